"""Acceptance suite: one test per criterion, each records a PASS/FAIL line
that is printed in the terminal summary."""

import random
import time
from fractions import Fraction

import pytest

import conftest
from lp_oracle import brute_force_optimum, random_bounded_lp
from rejsched import approx1, eptas, oracle
from rejsched.cli import main
from rejsched.errors import ZeroCost
from rejsched.instance import Instance, Job, serialize_instance, serialize_solution
from rejsched.list_scheduling import list_schedule
from rejsched.lp import solve

RATIO1_COUNT = 500
RATIO2_COUNT = 200
EPSILONS = (Fraction(1, 2), Fraction(1, 3))


def record(number, ok, detail):
    conftest.ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {detail}")
    assert ok, detail


def make_instance(rng, n_max, m_values):
    n = rng.randint(0, n_max)
    m = rng.choice(m_values)
    jobs = [(rng.randint(1, 20), rng.randint(0, 20)) for _ in range(n)]
    total = sum(p for p, _ in jobs)
    budget = rng.choice([Fraction(total, 2), Fraction(total), Fraction(2 * total)])
    return Instance.from_pairs(jobs, m, budget)


@pytest.fixture(scope="module")
def ratio1_runs():
    rng = random.Random(20240601)
    runs = []
    start = time.perf_counter()
    for _ in range(RATIO1_COUNT):
        instance = make_instance(rng, 10, (1, 2, 3))
        trace = []
        solution, report = approx1.run(instance, trace=trace)
        _, opt = oracle.solve_exact(instance)
        runs.append((instance, solution, report, opt.objective, trace))
    return runs, time.perf_counter() - start


@pytest.fixture(scope="module")
def ratio2_runs():
    rng = random.Random(20240602)
    runs = []
    start = time.perf_counter()
    for k in range(RATIO2_COUNT):
        instance = make_instance(rng, 8, (1, 2))
        eps = EPSILONS[k % 2]
        solution, report, diag = eptas.run(instance, eps)
        _, opt = oracle.solve_exact(instance)
        runs.append((instance, eps, solution, report, diag, opt.objective))
    return runs, time.perf_counter() - start


def test_criterion_01_approx1_ratio(ratio1_runs):
    runs, elapsed = ratio1_runs
    worst = max(
        (report.objective / opt for _, _, report, opt, _ in runs if opt), default=Fraction(0)
    )
    bad = [i for i, (_, _, report, opt, _) in enumerate(runs) if report.objective > 2 * opt]
    ok = len(runs) >= 500 and not bad and elapsed < 60
    record(1, ok, f"approx1 <= 2*OPT on {len(runs)} instances, worst ratio {float(worst):.4f}, "
                  f"{len(bad)} violations, {elapsed:.1f}s (< 60s)")


def test_criterion_02_eptas_ratio(ratio2_runs):
    runs, elapsed = ratio2_runs
    bad = [i for i, (_, eps, _, report, _, opt) in enumerate(runs) if report.objective > (1 + eps) * opt]
    capped = [i for i, run in enumerate(runs) if run[4].cap_exceeded or not run[4].guaranteed]
    worst = max((run[3].objective / run[5] for run in runs if run[5]), default=Fraction(0))
    ok = len(runs) >= 200 and not bad and not capped and elapsed < 600
    record(2, ok, f"eptas <= (1+eps)*OPT on {len(runs)} instances (eps 1/2, 1/3), worst ratio "
                  f"{float(worst):.4f}, {len(bad)} violations, {len(capped)} capped, {elapsed:.1f}s (< 600s)")


def test_criterion_03_rejection_lp_fractional(ratio1_runs):
    runs, _ = ratio1_runs
    sizes = [len(lp.X3) for *_, trace in runs for _, _, lp in trace]
    ok = bool(sizes) and max(sizes) <= 1
    record(3, ok, f"|X3| <= 1 over {len(sizes)} rejection LP solves (max {max(sizes, default=0)})")


def test_criterion_04_assignment_lp_fractional(ratio2_runs):
    runs, _ = ratio2_runs
    solves = sum(run[4].lp_solves for run in runs)
    bad = [i for i, (inst, _, _, _, diag, _) in enumerate(runs) if diag.max_fractional > inst.m + 1]
    ok = solves > 0 and not bad
    worst = max(run[4].max_fractional for run in runs)
    record(4, ok, f"|T2|+|S3| <= m+1 over {solves} assignment LP solves (max {worst}), {len(bad)} violations")


def test_criterion_05_lp_cross_validation(ratio1_runs):
    runs, _ = ratio1_runs
    knapsack = mismatched = 0
    for instance, *_ in runs:
        taken = 0
        for guess in approx1.enumerate_guesses(instance):
            part = approx1.partition_by_guess(instance, guess)
            if not part.X or not approx1.is_valid(instance, part):
                continue
            greedy = approx1.solve_rejection_lp(instance, part).objective
            vertex = solve(approx1.build_rejection_lp(instance, part))
            knapsack += 1
            mismatched += vertex.objective_value != greedy
            taken += 1
            if taken == 3:
                break
    rng = random.Random(20240605)
    generic = generic_bad = 0
    for _ in range(120):
        lp = random_bounded_lp(rng, max_vars=8)
        sol = solve(lp)
        expected = brute_force_optimum(lp)
        generic += 1
        if expected is None:
            generic_bad += sol.optimal
        else:
            generic_bad += not (sol.optimal and sol.objective_value == expected and lp.is_feasible(sol.x))
    ok = knapsack >= 500 and not mismatched and generic >= 100 and not generic_bad
    record(5, ok, f"greedy = simplex on {knapsack} rejection LPs ({mismatched} mismatches); "
                  f"simplex = vertex enumeration on {generic} LPs ({generic_bad} mismatches)")


def test_criterion_06_normalization(ratio1_runs):
    runs, _ = ratio1_runs
    checked = zero = bad = 0
    for instance, _, report, _, _ in runs:
        try:
            normalized, _ = eptas.normalize_by_approx1(instance, (None, report))
        except ZeroCost:
            zero += 1
            continue
        checked += 1
        again = approx1.run(normalized)[1].objective
        opt = oracle.solve_exact(normalized)[1].objective
        bad += not (again == 1 and Fraction(1, 2) <= opt <= 1)
    ok = checked > 0 and not bad
    record(6, ok, f"Approx1 = 1 and OPT in [1/2, 1] after normalization on {checked} instances "
                  f"({zero} zero-cost skipped), {bad} violations")


def test_criterion_07_penalty_rounding(ratio2_runs):
    runs, _ = ratio2_runs
    jobs = bad = 0
    for _, eps, _, _, diag, _ in runs:
        restricted = diag.restricted
        if restricted is None:
            continue
        bound = 1 + eps / 2
        for job in restricted.base.jobs:
            rounded = restricted.rounded_e[job.id]
            jobs += 1
            risky = job.e >= diag.delta_big
            bad += not (job.e <= rounded <= bound * job.e)
            bad += risky != (rounded >= diag.delta_big)
            bad += risky != (job.id in restricted.risky)
    ok = jobs > 0 and not bad
    record(7, ok, f"e <= e' <= (1+eps/2)e and risky class preserved on {jobs} jobs, {bad} violations")


def test_criterion_08_list_schedule_bound():
    rng = random.Random(20240608)
    bad = 0
    for _ in range(1000):
        m = rng.randint(1, 6)
        ps = [Fraction(rng.randint(1, 50), rng.choice([1, 2, 3, 7])) for _ in range(rng.randint(1, 25))]
        schedule = list_schedule([Job(j, p, Fraction(0)) for j, p in enumerate(ps)], m)
        bad += schedule.makespan > sum(ps) / m + max(ps)
    record(8, not bad, f"LS makespan <= sum(p)/m + max p on 1000 inputs, {bad} violations")


def test_criterion_09_feasibility(ratio1_runs, ratio2_runs, tmp_path, capsys):
    emitted = []
    for instance, solution, _, _, _ in ratio1_runs[0]:
        emitted.append((instance, solution))
        emitted.append((instance, oracle.solve_exact(instance)[0]))
    for instance, _, solution, _, _, _ in ratio2_runs[0]:
        emitted.append((instance, solution))
    over = exits = 0
    inst_path, sol_path = tmp_path / "i.json", tmp_path / "s.json"
    for instance, solution in emitted:
        accepted = sum((instance.jobs[j].p for j in solution.accepted()), Fraction(0))
        over += accepted > instance.budget
        inst_path.write_bytes(serialize_instance(instance))
        sol_path.write_bytes(serialize_solution(solution))
        exits += main(["check", "--instance", str(inst_path), "--solution", str(sol_path)]) != 0
    capsys.readouterr()
    ok = not over and not exits
    record(9, ok, f"{len(emitted)} emitted solutions: {over} over budget, {exits} nonzero check exits")


def test_criterion_10_bench_determinism(tmp_path):
    outputs = []
    for run in ("a", "b"):
        out = tmp_path / f"{run}.csv"
        code = main(["bench", "--count", "20", "--seed", "7", "--n", "1:7", "--m", "1,2",
                     "--eps", "1/3", "--out", str(out)])
        assert code == 0
        outputs.append(out.read_bytes())
    ok = outputs[0] == outputs[1] and len(outputs[0]) > 0
    record(10, ok, f"two bench runs (20 instances, seed 7) byte-identical: {ok}")
