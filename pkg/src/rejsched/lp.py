"""Exact rational simplex returning basic (vertex) optimal solutions.

Small dense tableau, two phases, Bland's rule against cycling. Meant for the
handful-of-dozens-of-variables LPs that the scheduling algorithms build, not
for anything large.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import InvariantViolation, ParseError
from .instance import as_rational, format_rational

LE, EQ, GE = "<=", "=", ">="
_FLIP = {LE: GE, GE: LE, EQ: EQ}


class Status(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class Constraint:
    row: tuple[Fraction, ...]
    sense: str
    rhs: Fraction


@dataclass
class LinearProgram:
    """minimize ``objective . x`` subject to ``constraints``, ``0 <= x <= upper``."""

    num_vars: int
    objective: tuple[Fraction, ...]
    constraints: list[Constraint] = field(default_factory=list)
    upper: Optional[tuple[Optional[Fraction], ...]] = None

    def __post_init__(self):
        self.objective = tuple(Fraction(c) for c in self.objective)
        if len(self.objective) != self.num_vars:
            raise ValueError("objective length differs from num_vars")
        if self.upper is not None and len(self.upper) != self.num_vars:
            raise ValueError("upper bound vector length differs from num_vars")
        for con in self.constraints:
            self._check(con)

    def _check(self, con):
        if len(con.row) != self.num_vars:
            raise ValueError("constraint row length differs from num_vars")
        if con.sense not in _FLIP:
            raise ValueError(f"unknown relation {con.sense!r}")

    def add(self, row: Sequence, sense: str, rhs) -> None:
        con = Constraint(tuple(Fraction(a) for a in row), sense, Fraction(rhs))
        self._check(con)
        self.constraints.append(con)

    def add_sparse(self, coeffs: dict[int, Fraction], sense: str, rhs) -> None:
        row = [Fraction(0)] * self.num_vars
        for k, a in coeffs.items():
            row[k] = Fraction(a)
        self.add(row, sense, rhs)

    def all_rows(self) -> list[Constraint]:
        """Constraints plus one ``x_k <= u_k`` row per finite upper bound."""
        rows = list(self.constraints)
        for k, u in enumerate(self.upper or ()):
            if u is not None:
                unit = [Fraction(0)] * self.num_vars
                unit[k] = Fraction(1)
                rows.append(Constraint(tuple(unit), LE, Fraction(u)))
        return rows

    def is_feasible(self, x: Sequence[Fraction]) -> bool:
        if any(v < 0 for v in x):
            return False
        for con in self.all_rows():
            lhs = sum((a * v for a, v in zip(con.row, x) if a), Fraction(0))
            if con.sense == LE and lhs > con.rhs:
                return False
            if con.sense == GE and lhs < con.rhs:
                return False
            if con.sense == EQ and lhs != con.rhs:
                return False
        return True


@dataclass(frozen=True)
class VertexSolution:
    status: Status
    x: tuple[Fraction, ...] = ()
    objective_value: Optional[Fraction] = None

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


class _Tableau:
    def __init__(self, rows, ncols, basis):
        self.rows = rows  # each row: ncols coefficients followed by rhs
        self.ncols = ncols
        self.basis = basis
        self.z = None

    def set_costs(self, cost):
        z = list(cost) + [Fraction(0)]
        for r, b in zip(self.rows, self.basis):
            cb = cost[b]
            if cb:
                for k, v in enumerate(r):
                    if v:
                        z[k] -= cb * v
        self.z = z

    def pivot(self, r, col):
        prow = self.rows[r]
        piv = prow[col]
        if piv != 1:
            prow = [v / piv if v else v for v in prow]
            self.rows[r] = prow
        nz = [k for k, v in enumerate(prow) if v]
        for i, row in enumerate(self.rows):
            if i != r:
                f = row[col]
                if f:
                    for k in nz:
                        row[k] -= f * prow[k]
        f = self.z[col]
        if f:
            for k in nz:
                self.z[k] -= f * prow[k]
        self.basis[r] = col

    def optimize(self, allowed):
        """Bland's rule; returns False if unbounded."""
        while True:
            col = next((k for k in allowed if self.z[k] < 0), None)
            if col is None:
                return True
            best = None
            for i, row in enumerate(self.rows):
                a = row[col]
                if a > 0:
                    ratio = row[-1] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return False
            self.pivot(best[1], col)


def solve(lp: LinearProgram) -> VertexSolution:
    n = lp.num_vars
    cons = lp.all_rows()
    nrows = len(cons)

    # standard form: rhs >= 0, one slack/surplus per inequality, artificials
    # for >= and = rows
    norm = []
    for con in cons:
        # a >= row with zero rhs negates into a <= row and needs no artificial
        if con.rhs < 0 or (con.rhs == 0 and con.sense == GE):
            norm.append(([-a for a in con.row], _FLIP[con.sense], -con.rhs))
        else:
            norm.append((list(con.row), con.sense, con.rhs))
    n_slack = sum(1 for _, s, _ in norm if s != EQ)
    n_art = sum(1 for _, s, _ in norm if s != LE)
    ncols = n + n_slack + n_art
    art_start = n + n_slack

    rows, basis = [], []
    s_col, a_col = n, art_start
    for coeffs, sense, rhs in norm:
        row = coeffs + [Fraction(0)] * (n_slack + n_art) + [rhs]
        if sense == LE:
            row[s_col] = Fraction(1)
            basis.append(s_col)
            s_col += 1
        else:
            if sense == GE:
                row[s_col] = Fraction(-1)
                s_col += 1
            row[a_col] = Fraction(1)
            basis.append(a_col)
            a_col += 1
        rows.append(row)

    tab = _Tableau(rows, ncols, basis)
    if n_art:
        tab.set_costs([Fraction(0)] * art_start + [Fraction(1)] * n_art)
        tab.optimize(range(ncols))
        if tab.z[-1] != 0:
            return VertexSolution(Status.INFEASIBLE)
        # drive degenerate artificials out of the basis, drop redundant rows
        i = 0
        while i < len(tab.rows):
            if tab.basis[i] >= art_start:
                row = tab.rows[i]
                col = next((k for k in range(art_start) if row[k]), None)
                if col is None:
                    del tab.rows[i]
                    del tab.basis[i]
                    continue
                tab.pivot(i, col)
            i += 1

    tab.set_costs(list(lp.objective) + [Fraction(0)] * (ncols - n))
    if not tab.optimize(range(art_start)):
        return VertexSolution(Status.UNBOUNDED)

    x = [Fraction(0)] * n
    for row, b in zip(tab.rows, tab.basis):
        if b < n:
            x[b] = row[-1]
    nonzero = sum(1 for v in x if v)
    if nonzero > nrows:
        raise InvariantViolation(f"basic solution has {nonzero} nonzeros for {nrows} rows")
    value = sum((c * v for c, v in zip(lp.objective, x) if c and v), Fraction(0))
    return VertexSolution(Status.OPTIMAL, tuple(x), value)


# -- plain-text LP format -------------------------------------------------------
#
#   # comment
#   min 1 0            objective coefficients (fixes the variable count)
#   1 1 = 1            one constraint per line: coefficients, relation, rhs
#   1 0 >= 5
#   upper - 3          optional per-variable upper bounds, "-" for none


def parse_lp(text: str) -> LinearProgram:
    lp = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        where = f"line {lineno}"
        if lp is None:
            if tokens[0] != "min":
                raise ParseError("first statement must be 'min c1 ... cn'", where)
            coeffs = [as_rational(t, where) for t in tokens[1:]]
            lp = LinearProgram(len(coeffs), tuple(coeffs))
        elif tokens[0] == "upper":
            bounds = [None if t in ("-", "inf") else as_rational(t, where) for t in tokens[1:]]
            if len(bounds) != lp.num_vars:
                raise ParseError("wrong number of upper bounds", where)
            lp.upper = tuple(bounds)
        else:
            if len(tokens) != lp.num_vars + 2 or tokens[-2] not in _FLIP:
                raise ParseError(f"expected {lp.num_vars} coefficients, relation, rhs", where)
            row = [as_rational(t, where) for t in tokens[:-2]]
            lp.add(row, tokens[-2], as_rational(tokens[-1], where))
    if lp is None:
        raise ParseError("empty LP", "line 1")
    return lp


def format_vertex(sol: VertexSolution) -> str:
    lines = [f"status {sol.status.value}"]
    if sol.optimal:
        lines.append(f"objective {format_rational(sol.objective_value)}")
        lines.append("x " + " ".join(format_rational(v) for v in sol.x))
    return "\n".join(lines) + "\n"
