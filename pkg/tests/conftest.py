import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import settings

from rejsched.instance import Instance, Solution, evaluate

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def brute_force(instance):
    """Minimum objective over every (m+1)^n decision vector. Independent of
    the oracle module: no subset logic, no branch and bound."""
    best = None
    for decisions in itertools.product(range(-1, instance.m), repeat=instance.n):
        report = evaluate(instance, Solution(decisions))
        if report.budget_ok and (best is None or report.objective < best):
            best = report.objective
    return best


def random_instance(rng, n_max=6, m_values=(1, 2, 3), p_max=20, e_max=20):
    n = rng.randint(0, n_max)
    m = rng.choice(m_values)
    jobs = [(rng.randint(1, p_max), rng.randint(0, e_max)) for _ in range(n)]
    total = sum(p for p, _ in jobs)
    budget = rng.choice([Fraction(total, 2), Fraction(total), Fraction(2 * total)])
    return Instance.from_pairs(jobs, m, budget)


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture
def example_instance():
    return Instance.from_pairs([(4, 10), (4, 10), (4, 1)], 2, 10)
