"""Exact rational linear programming (two-phase primal simplex, Bland's rule).

Solves ``max c.x  s.t.  A x = b, x >= 0`` over :class:`fractions.Fraction`.
Problems here are tiny (a handful of variables), so a dense tableau is fine;
what matters is that zero stays exactly zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: str
    x: Optional[tuple[Fraction, ...]] = None
    value: Optional[Fraction] = None


class _Tableau:
    def __init__(self, rows: list[list[Fraction]], rhs: list[Fraction], basis: list[int]):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis

    def pivot(self, r: int, col: int) -> None:
        row = self.rows[r]
        piv = row[col]
        if piv != 1:
            self.rows[r] = row = [v / piv for v in row]
            self.rhs[r] /= piv
        for k, other in enumerate(self.rows):
            if k == r:
                continue
            f = other[col]
            if f:
                self.rows[k] = [o - f * v for o, v in zip(other, row)]
                self.rhs[k] -= f * self.rhs[r]
        self.basis[r] = col

    def reduced_costs(self, cost: Sequence[Fraction]) -> list[Fraction]:
        ncols = len(self.rows[0]) if self.rows else len(cost)
        red = list(cost)
        for r, bv in enumerate(self.basis):
            cb = cost[bv]
            if cb:
                red = [rc - cb * v for rc, v in zip(red, self.rows[r])]
        return red[:ncols]

    def run(self, cost: Sequence[Fraction], allowed: int) -> str:
        """Maximize ``cost`` using columns ``< allowed`` as entering candidates."""
        while True:
            red = self.reduced_costs(cost)
            col = next((j for j in range(allowed) if red[j] > 0), None)
            if col is None:
                return OPTIMAL
            best = None
            for r, row in enumerate(self.rows):
                if row[col] > 0:
                    key = (self.rhs[r] / row[col], self.basis[r])
                    if best is None or key < best[0]:
                        best = (key, r)
            if best is None:
                return UNBOUNDED
            self.pivot(best[1], col)


def linprog_exact(
    c: Sequence, A_eq: Sequence[Sequence], b_eq: Sequence
) -> LPResult:
    """Maximize ``c.x`` subject to ``A_eq x = b_eq`` and ``x >= 0``, exactly."""
    c = [Fraction(v) for v in c]
    A = [[Fraction(v) for v in row] for row in A_eq]
    b = [Fraction(v) for v in b_eq]
    nvar = len(c)
    for k in range(len(A)):
        if b[k] < 0:
            A[k] = [-v for v in A[k]]
            b[k] = -b[k]
    nrow = len(A)
    # phase 1: one artificial per row
    rows = [A[k] + [Fraction(int(j == k)) for j in range(nrow)] for k in range(nrow)]
    tab = _Tableau(rows, list(b), [nvar + k for k in range(nrow)])
    phase1 = [Fraction(0)] * nvar + [Fraction(-1)] * nrow
    tab.run(phase1, nvar)
    if any(tab.rhs[r] != 0 for r, bv in enumerate(tab.basis) if bv >= nvar):
        return LPResult(INFEASIBLE)
    # drive zero-level artificials out of the basis, dropping redundant rows
    r = 0
    while r < len(tab.rows):
        if tab.basis[r] >= nvar:
            col = next((j for j in range(nvar) if tab.rows[r][j] != 0), None)
            if col is None:
                del tab.rows[r], tab.rhs[r], tab.basis[r]
                continue
            tab.pivot(r, col)
        r += 1
    tab.rows = [row[:nvar] for row in tab.rows]
    status = tab.run(c, nvar)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)
    x = [Fraction(0)] * nvar
    for r, bv in enumerate(tab.basis):
        x[bv] = tab.rhs[r]
    return LPResult(OPTIMAL, tuple(x), sum((ci * xi for ci, xi in zip(c, x)), Fraction(0)))
