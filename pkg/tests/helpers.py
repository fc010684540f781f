"""Random instance generators and an independent vertex-enumeration oracle."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from hypothesis import strategies as st

from finadd.core import FamilyMatrix


def rational(rng: random.Random, lo: int = -9, hi: int = 9, maxden: int = 4) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.randint(1, maxden))


def random_matrix(rng: random.Random, r: int, c: int, **kw) -> FamilyMatrix:
    return FamilyMatrix.from_lists([[rational(rng, **kw) for _ in range(c)] for _ in range(r)])


def labelled(values, prefix: str) -> FamilyMatrix:
    return FamilyMatrix.from_lists(values, rows=[f"{prefix}{i + 1}" for i in range(len(values))])


small_rationals = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def matrices(draw, max_rows: int = 4, max_cols: int = 4, elements=small_rationals):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    values = draw(st.lists(st.lists(elements, min_size=c, max_size=c), min_size=r, max_size=r))
    return FamilyMatrix.from_lists(values)


def solve_square(M, b):
    """Exact Gauss-Jordan; ``None`` when singular."""
    n = len(M)
    aug = [list(row) + [v] for row, v in zip(M, b)]
    for col in range(n):
        piv = next((i for i in range(col, n) if aug[i][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for i in range(n):
            if i != col and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [a - f * b_ for a, b_ in zip(aug[i], aug[col])]
    return [row[-1] for row in aug]


def vertex_hull_value(A: FamilyMatrix) -> Fraction:
    """``min_{m ∈ Δ} max_x Σ m f(x)`` by enumerating every vertex of the epigraph LP.

    Variables ``(m_1..m_r, t)``; a vertex makes ``Σ m = 1`` plus ``r`` of the
    constraints ``m_i >= 0`` / ``Σ_i m_i A[i][x] <= t`` tight.
    """
    r, c = len(A.rows), len(A.cols)
    cons = []
    for i in range(r):
        cons.append([Fraction(int(j == i)) for j in range(r)] + [Fraction(0)])
    for x in range(c):
        cons.append([A.values[i][x] for i in range(r)] + [Fraction(-1)])
    best = None
    for active in itertools.combinations(range(len(cons)), r):
        M = [[Fraction(1)] * r + [Fraction(0)]] + [cons[k] for k in active]
        sol = solve_square(M, [Fraction(1)] + [Fraction(0)] * r)
        if sol is None:
            continue
        m, t = sol[:r], sol[r]
        if any(v < 0 for v in m):
            continue
        if any(sum(m[i] * A.values[i][x] for i in range(r)) > t for x in range(c)):
            continue
        best = t if best is None else min(best, t)
    return best
