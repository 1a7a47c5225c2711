"""The guess-based 2-approximation, valid for any number of machines.

For every guess (p, e) of the largest accepted processing time and the
largest rejected penalty in an optimum, jobs with penalty above e are forced
in, jobs that are too long (or too cheap to reject) are forced out, and a
continuous knapsack decides the rest. Accepted jobs are list-scheduled.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import InvalidGuess, InvariantViolation
from .instance import REJECTED, CostReport, Instance, Solution, evaluate
from .list_scheduling import list_schedule
from .lp import EQ, LE, LinearProgram


@dataclass(frozen=True, order=True)
class Guess:
    p_threshold: Fraction
    e_threshold: Fraction


@dataclass(frozen=True)
class GuessPartition:
    A1: tuple[int, ...]
    R1: tuple[int, ...]
    X: tuple[int, ...]


@dataclass(frozen=True)
class RejectionLpResult:
    X1: tuple[int, ...]
    X2: tuple[int, ...]
    X3: tuple[int, ...]
    accepted_fraction: dict  # job id -> y_j
    objective: Fraction


def enumerate_guesses(instance: Instance) -> list[Guess]:
    ps = sorted(set(instance.p) | {Fraction(0)})
    es = sorted(set(instance.e) | {Fraction(0)})
    return [Guess(p, e) for p in ps for e in es]


def partition_by_guess(instance: Instance, guess: Guess) -> GuessPartition:
    A1, R1, X = [], [], []
    m = instance.m
    for job in instance.jobs:
        if job.e > guess.e_threshold:
            A1.append(job.id)
        elif job.p > guess.p_threshold or job.p > m * job.e:
            R1.append(job.id)
        else:
            X.append(job.id)
    return GuessPartition(tuple(A1), tuple(R1), tuple(X))


def forced_load(instance: Instance, partition: GuessPartition) -> Fraction:
    return sum((instance.jobs[j].p for j in partition.A1), Fraction(0))


def is_valid(instance: Instance, partition: GuessPartition) -> bool:
    # weak inequality: a forced set that exactly fills the budget is allowed
    return forced_load(instance, partition) <= instance.budget


def solve_rejection_lp(instance: Instance, partition: GuessPartition) -> RejectionLpResult:
    """Optimal basic solution of the rejection LP by greedy continuous knapsack.

    Each job in X saves ``e_j - p_j/m >= 0`` per unit of acceptance and uses
    ``p_j`` budget. Zero-length jobs go in first, then by saving per unit of
    processing time, highest first, ties by id. At most one job ends up
    fractional.
    """
    capacity = instance.budget - forced_load(instance, partition)
    if capacity < 0:
        raise InvalidGuess("forced-accept set exceeds the budget")
    m = instance.m
    jobs = [instance.jobs[j] for j in partition.X]

    def priority(job):
        if job.p == 0:
            return (0, Fraction(0), job.id)
        return (1, -(job.e - job.p / m) / job.p, job.id)

    y = {}
    for job in sorted(jobs, key=priority):
        if job.p <= capacity:
            y[job.id] = Fraction(1)
            capacity -= job.p
        elif capacity > 0:
            y[job.id] = capacity / job.p
            capacity = Fraction(0)
        else:
            y[job.id] = Fraction(0)

    X1 = tuple(j for j in partition.X if y[j] == 1)
    X2 = tuple(j for j in partition.X if y[j] == 0)
    X3 = tuple(j for j in partition.X if 0 < y[j] < 1)
    if len(X3) > 1:
        raise InvariantViolation(f"{len(X3)} fractional jobs in a basic rejection LP solution")
    objective = sum(
        (y[job.id] * job.p / m + (1 - y[job.id]) * job.e for job in jobs), Fraction(0)
    )
    return RejectionLpResult(X1, X2, X3, y, objective)


def build_rejection_lp(instance: Instance, partition: GuessPartition) -> LinearProgram:
    """The same LP in generic form: variables ``y_j`` then ``x_j`` per job of X."""
    X = partition.X
    k = len(X)
    m = instance.m
    objective = [instance.jobs[j].p / m for j in X] + [instance.jobs[j].e for j in X]
    lp = LinearProgram(2 * k, tuple(objective))
    lp.add_sparse(
        {a: instance.jobs[j].p for a, j in enumerate(X)},
        LE,
        instance.budget - forced_load(instance, partition),
    )
    for a in range(k):
        lp.add_sparse({a: 1, k + a: 1}, EQ, 1)
    return lp


def solution_for_guess(instance: Instance, partition: GuessPartition, lp: RejectionLpResult) -> Solution:
    accepted = sorted(partition.A1 + lp.X1)
    schedule = list_schedule((instance.jobs[j] for j in accepted), instance.m)
    decisions = [REJECTED] * instance.n
    for j, i in schedule.machine_of.items():
        decisions[j] = i
    return Solution(tuple(decisions))


def run(instance: Instance, trace: Optional[list] = None) -> tuple[Solution, CostReport]:
    """Best solution over all valid guesses, with all-reject as a fallback.

    If ``trace`` is a list, one ``(guess, partition, lp_result)`` tuple is
    appended per valid guess.
    """
    best_solution = Solution.all_rejected(instance.n)
    best_report = evaluate(instance, best_solution)
    for guess in enumerate_guesses(instance):
        partition = partition_by_guess(instance, guess)
        if not is_valid(instance, partition):
            continue
        lp = solve_rejection_lp(instance, partition)
        if trace is not None:
            trace.append((guess, partition, lp))
        solution = solution_for_guess(instance, partition, lp)
        report = evaluate(instance, solution)
        if not report.budget_ok:
            raise InvariantViolation("approx1 produced a budget-infeasible schedule")
        if report.objective < best_report.objective:
            best_solution, best_report = solution, report
    return best_solution, best_report
