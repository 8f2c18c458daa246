"""Exact feasibility for ``A z = b, z >= 0`` over the rationals.

Phase-1 simplex on ``min sum(artificials)`` with Bland's least-index rule.
An infeasible system comes back with a Farkas vector ``u`` such that
``u^T A >= 0`` and ``u^T b < 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union


class LpError(ValueError):
    pass


@dataclass(frozen=True)
class LpProblem:
    matrix: tuple[tuple[Fraction, ...], ...]
    rhs: tuple[Fraction, ...]

    def __init__(self, matrix: Sequence[Sequence], rhs: Sequence):
        rows = tuple(tuple(Fraction(c) for c in row) for row in matrix)
        b = tuple(Fraction(c) for c in rhs)
        if not rows or not rows[0]:
            raise LpError("need at least one row and one column")
        if len(rows) != len(b):
            raise LpError(f"{len(rows)} rows but rhs has {len(b)} entries")
        n = len(rows[0])
        if any(len(r) != n for r in rows):
            raise LpError("ragged constraint matrix")
        object.__setattr__(self, "matrix", rows)
        object.__setattr__(self, "rhs", b)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.matrix), len(self.matrix[0])


@dataclass(frozen=True)
class Feasible:
    point: tuple[Fraction, ...]


@dataclass(frozen=True)
class Infeasible:
    certificate: tuple[Fraction, ...]


LpOutcome = Union[Feasible, Infeasible]


def _primitive(u: list[Fraction]) -> tuple[Fraction, ...]:
    # positive rescaling keeps the Farkas conditions; integer form is easier to read
    den = math.lcm(*(c.denominator for c in u))
    ints = [int(c * den) for c in u]
    g = math.gcd(*ints) or 1
    return tuple(Fraction(c // g) for c in ints)


def solve_feasibility(p: LpProblem) -> LpOutcome:
    m, n = p.shape
    # flip rows so the artificial basis starts feasible
    signs = [1 if b >= 0 else -1 for b in p.rhs]
    width = n + m
    rows: list[list[Fraction]] = []
    for i in range(m):
        s = signs[i]
        row = [s * c for c in p.matrix[i]] + [Fraction(0)] * m
        row[n + i] = Fraction(1)
        rows.append(row)
    rhs = [s * b for s, b in zip(signs, p.rhs)]
    basis = [n + i for i in range(m)]
    # reduced costs of min sum(artificials) with the artificial basis
    cost = [-sum((rows[i][j] for i in range(m)), Fraction(0)) for j in range(n)] + [Fraction(0)] * m

    while True:
        enter = next((j for j in range(width) if cost[j] < 0), None)
        if enter is None:
            break
        leave, best = None, None
        for i in range(m):
            a = rows[i][enter]
            if a > 0:
                ratio = rhs[i] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        # phase 1 is bounded below by 0, so a leaving row always exists
        assert leave is not None
        _pivot(rows, rhs, cost, leave, enter)
        basis[leave] = enter

    objective = sum((rhs[i] for i in range(m) if basis[i] >= n), Fraction(0))
    if objective == 0:
        z = [Fraction(0)] * n
        for i, j in enumerate(basis):
            if j < n:
                z[j] = rhs[i]
        return Feasible(tuple(z))
    # duals of the flipped system: y_i = 1 - reduced cost of artificial i
    u = [-signs[i] * (1 - cost[n + i]) for i in range(m)]
    return Infeasible(_primitive(u))


def _pivot(rows, rhs, cost, r, c):
    prow = rows[r]
    piv = prow[c]
    if piv != 1:
        inv = 1 / piv
        for j, v in enumerate(prow):
            if v:
                prow[j] = v * inv
        rhs[r] *= inv
    nz = [j for j, v in enumerate(prow) if v]
    for i, row in enumerate(rows):
        if i == r:
            continue
        f = row[c]
        if f:
            for j in nz:
                row[j] -= f * prow[j]
            rhs[i] -= f * rhs[r]
    f = cost[c]
    if f:
        for j in nz:
            cost[j] -= f * prow[j]


def verify_outcome(p: LpProblem, o: LpOutcome) -> bool:
    """Re-check a solver outcome against ``p`` from scratch."""
    m, n = p.shape
    if isinstance(o, Feasible):
        z = o.point
        if len(z) != n:
            raise LpError(f"point has {len(z)} entries, expected {n}")
        if any(c < 0 for c in z):
            return False
        return all(
            sum((a * c for a, c in zip(row, z)), Fraction(0)) == b
            for row, b in zip(p.matrix, p.rhs)
        )
    if isinstance(o, Infeasible):
        u = o.certificate
        if len(u) != m:
            raise LpError(f"certificate has {len(u)} entries, expected {m}")
        if sum((a * b for a, b in zip(u, p.rhs)), Fraction(0)) >= 0:
            return False
        return all(
            sum((u[i] * p.matrix[i][j] for i in range(m)), Fraction(0)) >= 0
            for j in range(n)
        )
    raise TypeError(f"not an LP outcome: {o!r}")
