"""Scheduling with rejection on identical machines under a budget on total
accepted processing time: a 2-approximation, an approximation scheme for
fixed machine counts, and an exact oracle for small instances."""

from .instance import CostReport, Instance, Job, Solution, evaluate, normalize, parse_instance, serialize_instance

__all__ = [
    "CostReport",
    "Instance",
    "Job",
    "Solution",
    "evaluate",
    "normalize",
    "parse_instance",
    "serialize_instance",
]
__version__ = "0.1.0"
