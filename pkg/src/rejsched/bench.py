"""Instance generation, solution checking and ratio benchmarking."""
from __future__ import annotations

import csv
import io
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import approx1, eptas, oracle
from .errors import BadConfig, CapExceeded, SolutionError
from .instance import (
    REJECTED,
    CostReport,
    Instance,
    Job,
    Solution,
    evaluate,
    format_rational,
    serialize_instance,
    serialize_solution,
)

CSV_COLUMNS = (
    "id", "n", "m", "seed", "eps", "opt", "approx1", "eptas", "ratio1", "ratio2",
    "ms_exact", "ms_approx1", "ms_eptas", "candidates", "status",
)


@dataclass(frozen=True)
class GeneratorConfig:
    n: int
    m: int
    seed: int
    p_range: tuple[int, int] = (1, 20)
    e_range: tuple[int, int] = (0, 20)
    budget_mode: str = "tight"
    alpha: Fraction = Fraction(1)
    budget: Optional[Fraction] = None

    def validate(self):
        if self.n < 0 or self.m < 1:
            raise BadConfig("need n >= 0 and m >= 1")
        for name, (lo, hi) in (("p_range", self.p_range), ("e_range", self.e_range)):
            if lo > hi or lo < 0:
                raise BadConfig(f"{name} must be a nonempty nonnegative interval")
        if self.budget_mode == "tight":
            if Fraction(self.alpha) < 0:
                raise BadConfig("alpha must be nonnegative")
        elif self.budget_mode == "absolute":
            if self.budget is None or Fraction(self.budget) < 0:
                raise BadConfig("absolute budget mode needs a nonnegative budget")
        else:
            raise BadConfig(f"unknown budget mode {self.budget_mode!r}")


def gen(config: GeneratorConfig) -> Instance:
    config.validate()
    rng = random.Random(config.seed)
    jobs = []
    for k in range(config.n):
        p = rng.randint(*config.p_range)
        e = rng.randint(*config.e_range)
        jobs.append(Job(k, Fraction(p), Fraction(e)))
    if config.budget_mode == "tight":
        budget = Fraction(config.alpha) * sum(j.p for j in jobs)
    else:
        budget = Fraction(config.budget)
    return Instance(tuple(jobs), config.m, Fraction(budget))


def check(instance: Instance, solution: Solution) -> tuple[Optional[CostReport], list[str]]:
    """Full validation. Returns the report (if computable) and all violations."""
    violations = []
    if len(solution.decisions) != instance.n:
        violations.append(
            f"solution has {len(solution.decisions)} decisions but instance has {instance.n} jobs"
        )
    for j, d in enumerate(solution.decisions):
        if d != REJECTED and not 0 <= d < instance.m:
            violations.append(f"job {j}: machine index {d} outside 0..{instance.m - 1}")
    if violations:
        return None, violations
    try:
        report = evaluate(instance, solution)
    except SolutionError as exc:  # pragma: no cover - guarded above
        return None, [str(exc)]
    if not report.budget_ok:
        used = sum(report.loads)
        violations.append(
            f"budget exceeded: accepted load {format_rational(used)} > budget "
            f"{format_rational(instance.budget)} (over by {format_rational(used - instance.budget)})"
        )
    return report, violations


@dataclass(frozen=True)
class SuiteConfig:
    count: int = 100
    seed0: int = 0
    n_range: tuple[int, int] = (1, 10)
    m_values: tuple[int, ...] = (2,)
    eps: Fraction = Fraction(1, 2)
    p_range: tuple[int, int] = (1, 20)
    e_range: tuple[int, int] = (0, 20)
    alphas: tuple[Fraction, ...] = (Fraction(1, 2), Fraction(1), Fraction(2))
    limits: oracle.OracleLimits = field(default_factory=oracle.OracleLimits)
    caps: eptas.Caps = field(default_factory=eptas.Caps)
    timing: bool = False
    dump_dir: Optional[str] = None
    workers: int = 1


def suite_instance(suite: SuiteConfig, k: int) -> tuple[int, Instance]:
    seed = suite.seed0 + k
    pick = random.Random(f"suite-{seed}")
    config = GeneratorConfig(
        n=pick.randint(*suite.n_range),
        m=pick.choice(suite.m_values),
        seed=seed,
        p_range=suite.p_range,
        e_range=suite.e_range,
        alpha=pick.choice(suite.alphas),
    )
    return seed, gen(config)


def _ratio(value, opt):
    if opt == 0:
        return Fraction(1) if value == 0 else None
    return value / opt


def _fmt_ratio(r):
    if r is None:
        return "inf"
    return f"{format_rational(r)} ({float(r):.6f})"


def _timed(fn, *args):
    start = time.perf_counter()
    out = fn(*args)
    return out, (time.perf_counter() - start) * 1000


def bench_row(suite: SuiteConfig, k: int) -> dict:
    seed, instance = suite_instance(suite, k)
    eps = eptas.sanitize_epsilon(suite.eps)
    row = dict.fromkeys(CSV_COLUMNS, "")
    row.update(id=k, n=instance.n, m=instance.m, seed=seed, eps=format_rational(eps))
    status = []
    solutions = {}
    ms = {}
    try:
        opt = None
        if instance.n <= suite.limits.max_jobs and instance.m <= suite.limits.max_machines:
            (sol, rep), ms["exact"] = _timed(oracle.solve_exact, instance, suite.limits)
            opt = rep.objective
            solutions["exact"] = sol
            row["opt"] = format_rational(opt)
        else:
            status.append("oracle_skipped")

        (sol1, rep1), ms["approx1"] = _timed(approx1.run, instance)
        solutions["approx1"] = sol1
        row["approx1"] = format_rational(rep1.objective)

        start = time.perf_counter()
        try:
            sol2, rep2, diag = eptas.run(instance, eps, suite.caps)
        except CapExceeded as exc:
            sol2, rep2, diag = exc.partial
            status.append("cap_exceeded")
        ms["eptas"] = (time.perf_counter() - start) * 1000
        solutions["eptas"] = sol2
        row["eptas"] = format_rational(rep2.objective)
        row["candidates"] = diag.candidates

        for name, sol in solutions.items():
            if not evaluate(instance, sol).budget_ok:
                status.append(f"{name}_infeasible")
        if opt is not None:
            r1, r2 = _ratio(rep1.objective, opt), _ratio(rep2.objective, opt)
            row["ratio1"], row["ratio2"] = _fmt_ratio(r1), _fmt_ratio(r2)
            if r1 is None or r1 > 2:
                status.append("ratio1_violation")
            if r2 is None or r2 > 1 + eps:
                status.append("ratio2_violation")
    except Exception as exc:  # per-row failure; the suite carries on
        status.append(f"error:{type(exc).__name__}:{exc}")

    if suite.timing:
        for name in ("exact", "approx1", "eptas"):
            if name in ms:
                row[f"ms_{name}"] = f"{ms[name]:.3f}"
    if suite.dump_dir:
        out = Path(suite.dump_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{k}.instance.json").write_bytes(serialize_instance(instance))
        for name, sol in solutions.items():
            (out / f"{k}.{name}.json").write_bytes(serialize_solution(sol))
    row["status"] = ";".join(status) or "ok"
    return row


def _summary(rows, eps) -> dict:
    row = dict.fromkeys(CSV_COLUMNS, "")
    row["id"] = "max"
    row["eps"] = format_rational(eps)
    for col, key in (("ratio1", 0), ("ratio2", 1)):
        vals = []
        for r in rows:
            if r[col] == "inf":
                vals.append(None)
            elif r[col]:
                vals.append(Fraction(r[col].split()[0]))
        if vals:
            row[col] = "inf" if None in vals else _fmt_ratio(max(vals))
    bad = sum(1 for r in rows if "violation" in r["status"] or "error" in r["status"])
    row["status"] = "ok" if bad == 0 else f"violations={bad}"
    return row


def _row_job(args):
    return bench_row(*args)


def bench(suite: SuiteConfig) -> str:
    """Run the suite and return the CSV text (header, one row per instance, summary)."""
    ids = range(suite.count)
    if suite.workers > 1:
        with ProcessPoolExecutor(suite.workers) as pool:
            rows = list(pool.map(_row_job, [(suite, k) for k in ids]))
    else:
        rows = [bench_row(suite, k) for k in ids]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    writer.writerow(_summary(rows, eptas.sanitize_epsilon(suite.eps)))
    return buf.getvalue()
