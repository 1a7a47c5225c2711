"""Graham's list-scheduling rule."""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .instance import Job


@dataclass(frozen=True)
class Assignment:
    machine_of: dict[int, int]
    loads: tuple[Fraction, ...]

    @property
    def makespan(self) -> Fraction:
        return max(self.loads)


def list_schedule(jobs: Iterable[Job], m: int) -> Assignment:
    """Place jobs in the given order, each on a least-loaded machine.

    Ties go to the lowest machine index, so the result is deterministic.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    loads = [Fraction(0)] * m
    heap = [(Fraction(0), i) for i in range(m)]
    machine_of = {}
    for job in jobs:
        load, i = heapq.heappop(heap)
        machine_of[job.id] = i
        loads[i] = load + job.p
        heapq.heappush(heap, (loads[i], i))
    return Assignment(machine_of, tuple(loads))
