"""Exact optimum by exhaustive search, for certifying the approximations.

Every accept-subset within budget is tried; the optimal makespan of each is
found by branch and bound over machine assignments. Only practical for about
a dozen jobs.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import OracleTimeout, TooLarge
from .instance import REJECTED, CostReport, Instance, Solution, evaluate


@dataclass(frozen=True)
class OracleLimits:
    max_jobs: int = 12
    max_machines: int = 3
    timeout: Optional[float] = None  # seconds

    def __post_init__(self):
        if self.max_jobs < 1 or self.max_machines < 1:
            raise ValueError("oracle limits must be positive")
        if self.timeout is not None and self.timeout <= 0:
            raise ValueError("timeout must be positive")


class _Clock:
    def __init__(self, timeout):
        self.deadline = None if timeout is None else time.monotonic() + timeout

    def check(self):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise OracleTimeout("exact oracle ran out of time")


def _integerize(values: Sequence[Fraction]) -> list[int]:
    lcm = 1
    for v in values:
        lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
    return [int(v * lcm) for v in values]


def _bnb_makespan(p: list[int], m: int, clock=None) -> int:
    """Optimal makespan of integer jobs ``p`` on ``m`` identical machines."""
    if not p:
        return 0
    order = sorted(p, reverse=True)
    lower = max(order[0], -(-sum(order) // m))
    best = [sum(order)]
    loads = [0] * m
    steps = [0]

    def dfs(k, used):
        if k == len(order):
            best[0] = max(loads)
            return best[0] == lower
        steps[0] += 1
        if clock is not None and steps[0] % 4096 == 0:
            clock.check()
        seen = set()
        # machines beyond the first empty one are symmetric to it
        for i in range(min(used + 1, m)):
            if loads[i] in seen:
                continue
            seen.add(loads[i])
            if loads[i] + order[k] >= best[0]:
                continue
            loads[i] += order[k]
            done = dfs(k + 1, max(used, i + 1))
            loads[i] -= order[k]
            if done:
                return True
        return False

    dfs(0, 0)
    return best[0]


def min_makespan(p: Sequence, m: int, limits: OracleLimits = OracleLimits()) -> Fraction:
    p = [Fraction(v) for v in p]
    if len(p) > limits.max_jobs:
        raise TooLarge(f"{len(p)} jobs exceeds oracle limit {limits.max_jobs}")
    if m < 1:
        raise ValueError("m must be at least 1")
    if not p:
        return Fraction(0)
    ints = _integerize(p + [Fraction(1)])
    unit = ints[-1]
    return Fraction(_bnb_makespan(ints[:-1], m, _Clock(limits.timeout)), unit)


def _lexmin_assignment(p: list[int], m: int, target: int) -> Optional[list[int]]:
    """Lexicographically smallest machine vector (in job order) with makespan <= target."""
    loads = [0] * m
    out = [0] * len(p)

    def dfs(k, used):
        if k == len(p):
            return True
        for i in range(min(used + 1, m)):
            if loads[i] + p[k] <= target:
                loads[i] += p[k]
                out[k] = i
                if dfs(k + 1, max(used, i + 1)):
                    return True
                loads[i] -= p[k]
        return False

    return out if dfs(0, 0) else None


def solve_exact(instance: Instance, limits: OracleLimits = OracleLimits()) -> tuple[Solution, CostReport]:
    """Global optimum; ties go to the lexicographically smallest decision vector."""
    n, m = instance.n, instance.m
    if n > limits.max_jobs:
        raise TooLarge(f"{n} jobs exceeds oracle limit {limits.max_jobs}")
    if m > limits.max_machines:
        raise TooLarge(f"{m} machines exceeds oracle limit {limits.max_machines}")
    clock = _Clock(limits.timeout)

    # one common integer scale for p, e and U keeps comparisons exact and cheap
    ints = _integerize(list(instance.p) + list(instance.e) + [instance.budget])
    p, e, budget = ints[:n], ints[n : 2 * n], ints[2 * n]
    total_e = sum(e)

    best = None
    tied = []
    for mask in range(1 << n):
        clock.check()
        acc = [j for j in range(n) if mask >> j & 1]
        load = sum(p[j] for j in acc)
        if load > budget:
            continue
        penalty = total_e - sum(e[j] for j in acc)
        lower = penalty + (max(max(p[j] for j in acc), -(-load // m)) if acc else 0)
        if best is not None and lower > best:
            continue
        obj = penalty + _bnb_makespan([p[j] for j in acc], m, clock)
        if best is None or obj < best:
            best, tied = obj, [(mask, acc, obj - penalty)]
        elif obj == best:
            tied.append((mask, acc, obj - penalty))

    candidates = []
    for mask, acc, span in tied:
        machines = _lexmin_assignment([p[j] for j in acc], m, span)
        decisions = [REJECTED] * n
        for j, i in zip(acc, machines):
            decisions[j] = i
        candidates.append(tuple(decisions))
    solution = Solution(min(candidates))
    return solution, evaluate(instance, solution)
