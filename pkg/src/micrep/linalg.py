"""Small exact linear algebra over Fraction matrices.

Only what the cone/closure machinery needs: rank, independence filters,
and a reusable parametric solver for ``B @ lam = v`` with a fixed B.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

Vec = tuple[Fraction, ...]


def dot(u, v) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def vec_add(u, v) -> Vec:
    return tuple(a + b for a, b in zip(u, v))


def vec_scale(c, u) -> Vec:
    return tuple(c * a for a in u)


def is_zero_vec(u) -> bool:
    return all(a == 0 for a in u)


def rank(rows: list[Vec]) -> int:
    work = [list(map(Fraction, r)) for r in rows]
    n = len(work[0]) if work else 0
    r = 0
    for col in range(n):
        pivot = next((i for i in range(r, len(work)) if work[i][col] != 0), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        pv = work[r][col]
        work[r] = [a / pv for a in work[r]]
        for i in range(len(work)):
            if i != r and work[i][col] != 0:
                f = work[i][col]
                work[i] = [a - f * b for a, b in zip(work[i], work[r])]
        r += 1
        if r == len(work):
            break
    return r


def rows_independent(rows: list[Vec]) -> bool:
    return rank(rows) == len(rows)


def integerize(row) -> tuple[int, ...]:
    """Scale a rational vector by the lcm of denominators (positive)."""
    lcm = 1
    for a in row:
        d = Fraction(a).denominator
        lcm = lcm * d // gcd(lcm, d)
    return tuple(int(Fraction(a) * lcm) for a in row)


def primitive(row) -> tuple[int, ...]:
    """Integerize and divide by the gcd; zero vector stays zero."""
    ints = integerize(row)
    g = 0
    for a in ints:
        g = gcd(g, abs(a))
    if g <= 1:
        return ints
    return tuple(a // g for a in ints)


class LinSolver:
    """Parametric solver for ``B @ lam = v`` with B fixed (n x t).

    Precomputes the row reduction of B once; `solve` then returns a
    particular solution and a null-space basis for each right-hand side,
    or None when the system is inconsistent.
    """

    def __init__(self, columns: list[Vec]):
        self.t = len(columns)
        self.n = len(columns[0]) if columns else 0
        # Work on [B | I] so the accumulated row operations apply to any v.
        aug = [
            [Fraction(columns[j][i]) for j in range(self.t)]
            + [Fraction(1 if k == i else 0) for k in range(self.n)]
            for i in range(self.n)
        ]
        pivots: list[int] = []
        r = 0
        for col in range(self.t):
            pivot = next((i for i in range(r, self.n) if aug[i][col] != 0), None)
            if pivot is None:
                continue
            aug[r], aug[pivot] = aug[pivot], aug[r]
            pv = aug[r][col]
            aug[r] = [a / pv for a in aug[r]]
            for i in range(self.n):
                if i != r and aug[i][col] != 0:
                    f = aug[i][col]
                    aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
            pivots.append(col)
            r += 1
        self.rank = r
        self.pivot_cols = pivots
        self.free_cols = [j for j in range(self.t) if j not in pivots]
        self.reduced = [row[: self.t] for row in aug]
        self.ops = [row[self.t :] for row in aug]

    def solve(self, v: Vec):
        """Return (particular, null_basis) or None if inconsistent.

        particular: length-t solution with free variables set to 0.
        null_basis: one length-t vector per free column.
        """
        rhs = [dot(self.ops[i], v) for i in range(self.n)]
        for i in range(self.rank, self.n):
            if rhs[i] != 0:
                return None
        particular = [Fraction(0)] * self.t
        for i, col in enumerate(self.pivot_cols):
            particular[col] = rhs[i]
        null_basis = []
        for free in self.free_cols:
            vec = [Fraction(0)] * self.t
            vec[free] = Fraction(1)
            for i, col in enumerate(self.pivot_cols):
                vec[col] = -self.reduced[i][free]
            null_basis.append(tuple(vec))
        return tuple(particular), null_basis
