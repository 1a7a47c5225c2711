"""Approximation scheme for a fixed number of machines.

Pipeline: rescale by the Approx1 cost so the optimum lies in [1/2, 1]; round
penalties of high-penalty ("risky") jobs up to a grid; enumerate how many
jobs of each rounded-penalty group are rejected and where the long accepted
risky jobs go; settle the remaining jobs with an assignment LP whose vertex
has few fractional jobs; round those away. The cheapest candidate under the
original penalties wins.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from . import approx1
from .errors import (
    CapExceeded,
    EpsilonOutOfRange,
    InfeasibleBudget,
    InvariantViolation,
    RoundingOverflow,
    ZeroCost,
)
from .instance import REJECTED, CostReport, Instance, Solution, evaluate, format_rational, normalize
from .lp import EQ, GE, LE, LinearProgram, VertexSolution, solve


@dataclass(frozen=True)
class EptasParams:
    epsilon: Fraction
    m: int
    delta_big: Fraction
    delta_small: Fraction

    @property
    def max_rejected_risky(self) -> int:
        return int(1 / self.delta_big)

    @property
    def max_large(self) -> int:
        # (1 + eps/2) * m / Delta, an integer by construction
        return int((1 + self.epsilon / 2) * self.m / self.delta_big)


@dataclass(frozen=True)
class Caps:
    max_rejection_types: int = 10**6
    max_assignments: int = 10**6
    max_lp_solves: int = 10**7


@dataclass(frozen=True)
class RestrictedInstance:
    base: Instance
    rounded_e: tuple[Fraction, ...]
    risky: tuple[int, ...]
    safe: tuple[int, ...]
    # (group index i, job ids with rounded penalty i*delta sorted by p desc, id)
    groups: tuple[tuple[int, tuple[int, ...]], ...]


@dataclass(frozen=True)
class RiskySplit:
    accepted: tuple[int, ...]
    rejected: tuple[int, ...]
    large: tuple[int, ...]
    tiny: tuple[int, ...]
    prune_reason: Optional[str] = None


@dataclass(frozen=True)
class AssignLp:
    lp: LinearProgram
    tiny: tuple[int, ...]
    safe: tuple[int, ...]
    large_loads: tuple[Fraction, ...]
    y_var: dict  # (job, machine) -> column
    x_var: dict  # safe job -> column


@dataclass(frozen=True)
class AssignLpRounding:
    T1: tuple[int, ...]
    T2: tuple[int, ...]
    S1: tuple[int, ...]
    S2: tuple[int, ...]
    S3: tuple[int, ...]
    machine_of: dict
    lp_makespan: Fraction


@dataclass
class Diagnostics:
    epsilon: Fraction
    delta_big: Optional[Fraction] = None
    delta_small: Optional[Fraction] = None
    scale: Optional[Fraction] = None
    zero_cost: bool = False
    risky: int = 0
    groups: int = 0
    rejection_types: int = 0
    pruned_large_count: int = 0
    pruned_budget: int = 0
    pruned_cost_bound: int = 0
    assignments: int = 0
    lp_solves: int = 0
    lp_infeasible: int = 0
    candidates: int = 0
    max_fractional: int = 0
    best_enumerated: Optional[Fraction] = None
    cap_exceeded: Optional[str] = None
    guaranteed: bool = True
    winner: str = ""
    restricted: Optional[RestrictedInstance] = field(default=None, repr=False)

    def to_dict(self) -> dict:
        out = {}
        for key, value in self.__dict__.items():
            if key == "restricted":
                continue
            out[key] = format_rational(value) if isinstance(value, Fraction) else value
        return out


def sanitize_epsilon(eps_raw) -> Fraction:
    """Largest ``1/k`` not above ``eps_raw``."""
    eps = Fraction(eps_raw)
    if not 0 < eps < 1:
        raise EpsilonOutOfRange(f"epsilon must lie in (0, 1), got {eps}")
    return Fraction(1, math.ceil(1 / eps))


def make_params(eps, m: int) -> EptasParams:
    eps = Fraction(eps)
    if eps.numerator != 1:
        raise EpsilonOutOfRange("epsilon must be 1/k; call sanitize_epsilon first")
    big = eps / (4 * m + 12)
    return EptasParams(eps, m, big, eps * big / 2)


def normalize_by_approx1(instance: Instance, approx=None) -> tuple[Instance, Fraction]:
    """Rescale so the Approx1 cost becomes 1; raises ZeroCost if it is 0."""
    if approx is None:
        approx = approx1.run(instance)
    z = approx[1].objective
    if z == 0:
        raise ZeroCost(approx)
    return normalize(instance, z), z


def build_restricted(normalized: Instance, params: EptasParams) -> RestrictedInstance:
    eps, big, small = params.epsilon, params.delta_big, params.delta_small
    rounded, risky, safe = [], [], []
    groups: dict[int, list[int]] = {}
    for job in normalized.jobs:
        if job.e >= big:
            i = math.ceil(job.e / small)
            e2 = i * small
            risky.append(job.id)
            groups.setdefault(i, []).append(job.id)
        else:
            e2 = job.e
            safe.append(job.id)
        if not (job.e <= e2 <= (1 + eps / 2) * job.e) or (job.e >= big) != (e2 >= big):
            raise InvariantViolation(f"penalty rounding broke its bounds on job {job.id}")
        rounded.append(e2)
    ordered = tuple(
        (i, tuple(sorted(ids, key=lambda j: (-normalized.jobs[j].p, j))))
        for i, ids in sorted(groups.items())
    )
    return RestrictedInstance(normalized, tuple(rounded), tuple(risky), tuple(safe), ordered)


def enumerate_rejection_types(
    restricted: RestrictedInstance,
    params: EptasParams,
    cap: int,
    max_penalty: Optional[Fraction] = None,
) -> Iterator[tuple[int, ...]]:
    """Rejection counts per nonempty group, in lexicographic order.

    Sum of counts stays within ``1/Delta`` and each count within its group
    size. With ``max_penalty`` set, tuples whose rejected rounded penalty
    exceeds it are skipped.
    """
    groups = restricted.groups
    sizes = [len(ids) for _, ids in groups]
    unit = [i * params.delta_small for i, _ in groups]
    produced = 0

    def rec(g, left, penalty, prefix):
        nonlocal produced
        if g == len(groups):
            produced += 1
            if produced > cap:
                raise CapExceeded("rejection types", cap)
            yield tuple(prefix)
            return
        for k in range(min(sizes[g], left) + 1):
            pen = penalty + k * unit[g]
            if max_penalty is not None and pen > max_penalty:
                break
            prefix.append(k)
            yield from rec(g + 1, left - k, pen, prefix)
            prefix.pop()

    yield from rec(0, params.max_rejected_risky, Fraction(0), [])


def apply_rejection_type(
    restricted: RestrictedInstance, ktype: Sequence[int], params: EptasParams
) -> RiskySplit:
    """Reject the ``k_i`` longest jobs of each group; split the rest by length."""
    base = restricted.base
    rejected, accepted = [], []
    for k, (_, ids) in zip(ktype, restricted.groups):
        rejected.extend(ids[:k])
        accepted.extend(ids[k:])
    accepted.sort()
    rejected.sort()
    large = tuple(j for j in accepted if base.jobs[j].p >= params.delta_big)
    tiny = tuple(j for j in accepted if base.jobs[j].p < params.delta_big)
    reason = None
    if len(large) > params.max_large:
        reason = "large_count"
    elif sum((base.jobs[j].p for j in accepted), Fraction(0)) > base.budget:
        reason = "budget"
    return RiskySplit(tuple(accepted), tuple(rejected), large, tiny, reason)


def enumerate_large_assignments(
    num_large: int, m: int, cap: int, canonical: bool = False
) -> Iterator[tuple[int, ...]]:
    """Machine tuples for the large jobs, lexicographic.

    ``canonical`` keeps only one representative per relabeling of the
    (identical) machines: a job may open at most the next unused machine.
    """
    if canonical:
        source = _restricted_growth(num_large, m)
    else:
        source = itertools.product(range(m), repeat=num_large)
    for count, item in enumerate(source, 1):
        if count > cap:
            raise CapExceeded("large job assignments", cap)
        yield tuple(item)


def _restricted_growth(length, m):
    out = [0] * length

    def rec(k, used):
        if k == length:
            yield tuple(out)
            return
        for i in range(min(used + 1, m)):
            out[k] = i
            yield from rec(k + 1, max(used, i + 1))

    yield from rec(0, 0)


def build_assign_lp(
    restricted: RestrictedInstance, split: RiskySplit, assignment: Sequence[int]
) -> AssignLp:
    """Assignment LP for tiny and safe jobs given fixed large-job machines.

    Columns: makespan first, then ``y[j, i]`` for each tiny/safe job j (id
    order) and machine i, then ``x[j]`` (reject) for each safe job.
    """
    base = restricted.base
    m = base.m
    capacity = base.budget - sum((base.jobs[j].p for j in split.accepted), Fraction(0))
    if capacity < 0:
        raise InfeasibleBudget("accepted risky jobs exceed the budget")
    loads = [Fraction(0)] * m
    for j, i in zip(split.large, assignment):
        loads[i] += base.jobs[j].p

    tiny, safe = split.tiny, restricted.safe
    flexible = sorted(tiny + safe)
    y_var, x_var = {}, {}
    col = 1
    for j in flexible:
        for i in range(m):
            y_var[j, i] = col
            col += 1
    for j in safe:
        x_var[j] = col
        col += 1

    objective = [Fraction(0)] * col
    objective[0] = Fraction(1)
    for j in safe:
        objective[x_var[j]] = restricted.rounded_e[j]
    lp = LinearProgram(col, tuple(objective))
    for j in tiny:
        lp.add_sparse({y_var[j, i]: 1 for i in range(m)}, EQ, 1)
    for j in safe:
        coeffs = {y_var[j, i]: 1 for i in range(m)}
        coeffs[x_var[j]] = 1
        lp.add_sparse(coeffs, EQ, 1)
    for i in range(m):
        coeffs = {0: 1}
        for j in flexible:
            coeffs[y_var[j, i]] = -base.jobs[j].p
        lp.add_sparse(coeffs, GE, loads[i])
    # sum over safe of (1 - x_j) p_j <= capacity, with the constant moved right
    safe_total = sum((base.jobs[j].p for j in safe), Fraction(0))
    lp.add_sparse({x_var[j]: -base.jobs[j].p for j in safe}, LE, capacity - safe_total)
    return AssignLp(lp, tiny, safe, tuple(loads), y_var, x_var)


def round_assign_lp(vertex: VertexSolution, alp: AssignLp, m: int) -> AssignLpRounding:
    """Read off integral jobs; fractional safe jobs are rejected and
    fractional tiny jobs are dealt round-robin, at most two per machine."""
    x = vertex.x

    def integral_machine(j):
        for i in range(m):
            if x[alp.y_var[j, i]] == 1:
                return i
        return None

    machine_of = {}
    T1, T2 = [], []
    for j in alp.tiny:
        i = integral_machine(j)
        if i is None:
            T2.append(j)
        else:
            T1.append(j)
            machine_of[j] = i
    S1, S2, S3 = [], [], []
    for j in alp.safe:
        i = integral_machine(j)
        if i is not None:
            S1.append(j)
            machine_of[j] = i
        elif x[alp.x_var[j]] == 1:
            S2.append(j)
        else:
            S3.append(j)
    if len(T2) + len(S3) > m + 1:
        raise InvariantViolation(f"|T2| + |S3| = {len(T2) + len(S3)} exceeds m + 1 = {m + 1}")
    if len(T2) > 2 * m:
        raise RoundingOverflow(f"{len(T2)} fractional tiny jobs for {m} machines")
    for k, j in enumerate(T2):
        machine_of[j] = k % m
    return AssignLpRounding(
        tuple(T1), tuple(T2), tuple(S1), tuple(S2), tuple(S3), machine_of, x[0]
    )


def _decisions(n, split, assignment, rounding):
    decisions = [REJECTED] * n
    for j, i in zip(split.large, assignment):
        decisions[j] = i
    for j, i in rounding.machine_of.items():
        decisions[j] = i
    return Solution(tuple(decisions))


def run(instance: Instance, eps_raw, caps: Caps = Caps()) -> tuple[Solution, CostReport, Diagnostics]:
    """Best candidate under the original instance, plus run diagnostics.

    The Approx1 schedule and the all-reject schedule are always candidates.
    Raises CapExceeded (with ``partial`` set) if an enumeration cap is hit.
    """
    eps = sanitize_epsilon(eps_raw)
    diag = Diagnostics(epsilon=eps)
    approx = approx1.run(instance)
    best = [approx[0], approx[1], "approx1"]

    def consider(solution, label, enumerated=False):
        diag.candidates += 1
        report = evaluate(instance, solution)
        if not report.budget_ok:
            raise InvariantViolation(f"candidate {label} violates the budget")
        if enumerated and (
            diag.best_enumerated is None or report.objective < diag.best_enumerated
        ):
            diag.best_enumerated = report.objective
        if report.objective < best[1].objective:
            best[:] = [solution, report, label]

    consider(Solution.all_rejected(instance.n), "all_reject")
    try:
        normalized, scale = normalize_by_approx1(instance, approx)
    except ZeroCost:
        diag.zero_cost = True
        diag.winner = best[2]
        return best[0], best[1], diag

    params = make_params(eps, instance.m)
    diag.delta_big, diag.delta_small, diag.scale = params.delta_big, params.delta_small, scale
    restricted = build_restricted(normalized, params)
    diag.restricted = restricted
    diag.risky, diag.groups = len(restricted.risky), len(restricted.groups)
    # any schedule worth finding costs at most (1 + eps/2) in normalized units
    cost_bound = 1 + eps / 2

    try:
        for ktype in enumerate_rejection_types(
            restricted, params, caps.max_rejection_types, max_penalty=cost_bound
        ):
            diag.rejection_types += 1
            split = apply_rejection_type(restricted, ktype, params)
            if split.prune_reason == "large_count":
                diag.pruned_large_count += 1
                continue
            if split.prune_reason == "budget":
                diag.pruned_budget += 1
                continue
            rejected_penalty = sum((restricted.rounded_e[j] for j in split.rejected), Fraction(0))
            for assignment in enumerate_large_assignments(
                len(split.large), instance.m, caps.max_assignments, canonical=True
            ):
                diag.assignments += 1
                alp = build_assign_lp(restricted, split, assignment)
                if max(alp.large_loads) + rejected_penalty > cost_bound:
                    diag.pruned_cost_bound += 1
                    continue
                if diag.lp_solves >= caps.max_lp_solves:
                    raise CapExceeded("LP solves", caps.max_lp_solves)
                diag.lp_solves += 1
                vertex = solve(alp.lp)
                if not vertex.optimal:
                    diag.lp_infeasible += 1
                    continue
                rounding = round_assign_lp(vertex, alp, instance.m)
                diag.max_fractional = max(
                    diag.max_fractional, len(rounding.T2) + len(rounding.S3)
                )
                solution = _decisions(instance.n, split, assignment, rounding)
                scaled = evaluate(normalized, solution)
                if scaled.makespan > rounding.lp_makespan + 2 * params.delta_big:
                    raise InvariantViolation("rounded makespan exceeds LP makespan + 2*Delta")
                consider(solution, f"type={ktype} assign={assignment}", enumerated=True)
    except CapExceeded as exc:
        diag.cap_exceeded = str(exc)
        diag.guaranteed = False
        diag.winner = best[2]
        raise CapExceeded(exc.what, exc.cap, partial=(best[0], best[1], diag)) from None

    diag.winner = best[2]
    return best[0], best[1], diag
