"""Deterministic exact linear solving over the Gaussian rationals.

This is the engine behind every degree-by-degree homological solve.
Determinism is part of the contract: leftmost-pivot reduced row echelon
form, free variables pinned to zero in the particular solution, kernel
basis in echelon form.  Identical systems give identical answers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .coeff import GaussianRational, ZERO, ONE

__all__ = ["LinearSystem", "LinearSolution", "solve_system", "solve"]


@dataclass
class LinearSystem:
    matrix: list          # rows x cols grid of GaussianRational
    rhs: list             # length rows
    labels: list = field(default_factory=list)  # one label per column, fixed order

    def __post_init__(self):
        rows = len(self.matrix)
        if len(self.rhs) != rows:
            raise ValueError("rhs length disagrees with row count")
        cols = len(self.matrix[0]) if rows else len(self.labels)
        for r in self.matrix:
            if len(r) != cols:
                raise ValueError("ragged matrix")
        if not self.labels:
            self.labels = list(range(cols))
        elif len(self.labels) != cols:
            raise ValueError("label count disagrees with column count")


@dataclass
class LinearSolution:
    solution: list        # particular solution, free variables = 0
    kernel: list          # kernel basis vectors, echelon form
    pivots: list          # pivot column indices


def solve(matrix, rhs):
    """RREF solve; returns LinearSolution or None when inconsistent."""
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    a = [list(r) + [b] for r, b in zip(matrix, rhs)]
    pivots = []
    prow = 0
    for pc in range(cols):
        sel = None
        for r in range(prow, rows):
            if not a[r][pc].is_zero():
                sel = r
                break
        if sel is None:
            continue
        a[prow], a[sel] = a[sel], a[prow]
        inv = a[prow][pc].inverse()
        a[prow] = [x * inv for x in a[prow]]
        for r in range(rows):
            if r != prow and not a[r][pc].is_zero():
                f = a[r][pc]
                arow, prow_v = a[r], a[prow]
                a[r] = [x - f * y for x, y in zip(arow, prow_v)]
        pivots.append(pc)
        prow += 1
        if prow == rows:
            break
    for r in range(prow, rows):
        if not a[r][cols].is_zero():
            return None
    sol = [ZERO] * cols
    for i, pc in enumerate(pivots):
        sol[pc] = a[i][cols]
    pivset = set(pivots)
    kernel = []
    for fc in range(cols):
        if fc in pivset:
            continue
        v = [ZERO] * cols
        v[fc] = ONE
        for i, pc in enumerate(pivots):
            v[pc] = -a[i][fc]
        kernel.append(v)
    return LinearSolution(sol, kernel, pivots)


def solve_system(sys: LinearSystem):
    return solve(sys.matrix, sys.rhs)
