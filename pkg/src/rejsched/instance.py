"""Problem data, exact cost evaluation and JSON (de)serialization.

All quantities are :class:`fractions.Fraction`; nothing in the solver core
touches floating point.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    BadMachineIndex,
    MismatchedLength,
    MissingField,
    MissingMachines,
    NegativeValue,
    NonPositiveScale,
    ParseError,
)

REJECTED = -1


def as_rational(value, position=None) -> Fraction:
    """Convert an int, Fraction, or string ("3", "0.25", "7/2") to a Fraction.

    Decimal strings convert exactly. Floats and bools are refused because
    they cannot round-trip bit-exactly.
    """
    if isinstance(value, bool):
        raise ParseError(f"expected a number, got {value!r}", position)
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"not a rational number: {value!r}", position) from None
    raise ParseError(f"expected a number, got {type(value).__name__}", position)


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Job:
    id: int
    p: Fraction
    e: Fraction

    def __post_init__(self):
        if self.p < 0 or self.e < 0:
            raise NegativeValue(f"job {self.id} has negative p or e")


@dataclass(frozen=True)
class Instance:
    jobs: tuple[Job, ...]
    m: int
    budget: Fraction

    def __post_init__(self):
        if self.m < 1:
            raise MissingMachines("instance needs at least one machine")
        if self.budget < 0:
            raise NegativeValue("budget is negative")
        for k, job in enumerate(self.jobs):
            if job.id != k:
                raise ValueError(f"job ids must be 0..n-1 in order, got {job.id} at {k}")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple], m: int, budget) -> "Instance":
        """Build from ``(p, e)`` pairs; values go through :func:`as_rational`."""
        jobs = tuple(
            Job(k, as_rational(p), as_rational(e)) for k, (p, e) in enumerate(pairs)
        )
        return cls(jobs, int(m), as_rational(budget))

    @property
    def n(self) -> int:
        return len(self.jobs)

    @property
    def p(self) -> tuple[Fraction, ...]:
        return tuple(j.p for j in self.jobs)

    @property
    def e(self) -> tuple[Fraction, ...]:
        return tuple(j.e for j in self.jobs)


@dataclass(frozen=True)
class Solution:
    """Per-job decision: ``-1`` for rejected, otherwise the machine index."""

    decisions: tuple[int, ...]

    @classmethod
    def all_rejected(cls, n: int) -> "Solution":
        return cls((REJECTED,) * n)

    def accepted(self) -> list[int]:
        return [j for j, d in enumerate(self.decisions) if d != REJECTED]

    def rejected(self) -> list[int]:
        return [j for j, d in enumerate(self.decisions) if d == REJECTED]


@dataclass(frozen=True)
class CostReport:
    loads: tuple[Fraction, ...]
    makespan: Fraction
    penalty_total: Fraction
    objective: Fraction
    budget_ok: bool

    def to_dict(self) -> dict:
        return {
            "loads": [format_rational(t) for t in self.loads],
            "makespan": format_rational(self.makespan),
            "penalty_total": format_rational(self.penalty_total),
            "objective": format_rational(self.objective),
            "budget_ok": self.budget_ok,
        }


def evaluate(instance: Instance, solution: Solution) -> CostReport:
    if len(solution.decisions) != instance.n:
        raise MismatchedLength(
            f"solution has {len(solution.decisions)} decisions, instance has {instance.n} jobs"
        )
    loads = [Fraction(0)] * instance.m
    penalty = Fraction(0)
    for job, d in zip(instance.jobs, solution.decisions):
        if d == REJECTED:
            penalty += job.e
        elif 0 <= d < instance.m:
            loads[d] += job.p
        else:
            raise BadMachineIndex(f"job {job.id} assigned to machine {d}, m={instance.m}")
    makespan = max(loads)
    return CostReport(
        loads=tuple(loads),
        makespan=makespan,
        penalty_total=penalty,
        objective=makespan + penalty,
        budget_ok=sum(loads) <= instance.budget,
    )


def normalize(instance: Instance, scale) -> Instance:
    """Divide every p, e and the budget by ``scale``.

    The budget is rescaled too, so the set of feasible solutions is unchanged
    and objectives shrink by exactly ``scale``.
    """
    scale = Fraction(scale)
    if scale <= 0:
        raise NonPositiveScale(f"scale must be positive, got {scale}")
    if scale == 1:
        return instance
    jobs = tuple(Job(j.id, j.p / scale, j.e / scale) for j in instance.jobs)
    return Instance(jobs, instance.m, instance.budget / scale)


# -- JSON ---------------------------------------------------------------------


def _load_json(text):
    if isinstance(text, (bytes, bytearray)):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError("input is not UTF-8", exc.start) from None
    try:
        return json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.pos) from None


def _field(obj, key, path):
    if not isinstance(obj, dict):
        raise ParseError("expected an object", path or "$")
    if key not in obj:
        raise MissingField(f"missing field {key!r}", path or "$")
    return obj[key]


def _nonneg(value, path) -> Fraction:
    q = as_rational(value, path)
    if q < 0:
        raise NegativeValue(f"negative value {format_rational(q)}", path)
    return q


def instance_from_dict(data) -> Instance:
    m = _field(data, "m", "")
    if isinstance(m, bool) or not isinstance(m, int):
        raise ParseError("m must be an integer", "m")
    if m < 1:
        raise MissingMachines("m must be at least 1", "m")
    budget = _nonneg(_field(data, "budget", ""), "budget")
    raw_jobs = _field(data, "jobs", "")
    if not isinstance(raw_jobs, list):
        raise ParseError("jobs must be an array", "jobs")
    jobs = []
    for k, raw in enumerate(raw_jobs):
        path = f"jobs[{k}]"
        p = _nonneg(_field(raw, "p", path), f"{path}.p")
        e = _nonneg(_field(raw, "e", path), f"{path}.e")
        jobs.append(Job(k, p, e))
    return Instance(tuple(jobs), m, budget)


def instance_to_dict(instance: Instance) -> dict:
    return {
        "m": instance.m,
        "budget": format_rational(instance.budget),
        "jobs": [
            {"p": format_rational(j.p), "e": format_rational(j.e)} for j in instance.jobs
        ],
    }


def parse_instance(text) -> Instance:
    return instance_from_dict(_load_json(text))


def serialize_instance(instance: Instance) -> bytes:
    return (json.dumps(instance_to_dict(instance), indent=1) + "\n").encode()


def parse_solution(text) -> Solution:
    data = _load_json(text)
    raw = _field(data, "decisions", "")
    if not isinstance(raw, list):
        raise ParseError("decisions must be an array", "decisions")
    out = []
    for k, d in enumerate(raw):
        if isinstance(d, bool) or not isinstance(d, int):
            raise ParseError("decision must be an integer", f"decisions[{k}]")
        out.append(d)
    return Solution(tuple(out))


def serialize_solution(solution: Solution) -> bytes:
    return (json.dumps({"decisions": list(solution.decisions)}) + "\n").encode()


def total(values: Sequence[Fraction]) -> Fraction:
    return sum(values, Fraction(0))
