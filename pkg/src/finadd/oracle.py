"""Brute-force checks that do not share code paths with the LP engine.

``grid_minimax`` scans mixtures with weights in ``{0, 1/N, ..., 1}``.  Small
grids are enumerated outright.  Larger ones use the same level-by-level
enumeration but discard partial mixtures that a weak-duality lower bound
already places at or above the best complete mixture seen; every bound is
an elementary inequality over integers, so the result is still the exact
grid minimum.  A floating LP only supplies the starting incumbent and the
bound weights, never the answer.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from math import comb

import numpy as np
from scipy.optimize import linprog

from .core import FamilyMatrix
from .domination import DominationInstance

PLAIN_LIMIT = 200_000
ENUMERATION_CAP = 2_000_000


def _integer_matrix(A: FamilyMatrix, N: int) -> tuple[np.ndarray, int]:
    den = math.lcm(*(v.denominator for row in A.values for v in row))
    ints = [[int(v * den) for v in row] for row in A.values]
    big = max(abs(v) for row in ints for v in row)
    # headroom for N-fold sums weighted by bound weights totalling about 10^6
    dtype = np.int64 if 2 * big * N * (10**6 + len(A.cols)) < 2**62 else object
    return np.array(ints, dtype=dtype), den


def _float_mixture(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    r, c = A.shape
    res = linprog(
        np.r_[np.zeros(r), 1.0],
        A_ub=np.c_[A.T.astype(float), -np.ones(c)],
        b_ub=np.zeros(c),
        A_eq=np.r_[np.ones(r), 0.0][None],
        b_eq=[1.0],
        bounds=[(0, None)] * r + [(None, None)],
        method="highs",
    )
    if res.status != 0:
        return np.full(r, 1.0 / r), np.full(c, 1.0 / c)
    h = np.clip(-res.ineqlin.marginals, 0, None)
    return np.clip(res.x[:r], 0, None), h


def _round_to_grid(m: np.ndarray, N: int) -> np.ndarray:
    m = m / m.sum() if m.sum() > 0 else np.full(len(m), 1.0 / len(m))
    k = np.floor(m * N).astype(np.int64)
    k[np.argsort(-(m * N - k), kind="stable")[: N - int(k.sum())]] += 1
    return k


def _polish(k: np.ndarray, A: np.ndarray) -> tuple[np.ndarray, int]:
    """Greedy one-unit transfers while the grid objective strictly drops."""
    best = int((k @ A).max())
    r = len(k)
    while True:
        step = None
        for a in range(r):
            if k[a] == 0:
                continue
            for b in range(r):
                if a == b:
                    continue
                k2 = k.copy()
                k2[a] -= 1
                k2[b] += 1
                v = int((k2 @ A).max())
                if v < best and (step is None or v < step[0]):
                    step = (v, k2)
        if step is None:
            return k, best
        best, k = step


def _grid_search(A: np.ndarray, N: int, prune: bool) -> int:
    """``min over k ∈ Z^r_{>=0}, Σk = N`` of ``max_x (k A)_x``."""
    r, c = A.shape
    if prune:
        m, h = _float_mixture(A)
        _, inc = _polish(_round_to_grid(m, N), A)
        H = np.round(h / h.sum() * 10**6).astype(np.int64) if h.sum() > 0 else np.ones(c, dtype=np.int64)
        if H.sum() == 0:
            H = np.ones(c, dtype=np.int64)
        H = H.astype(A.dtype)
        Hs = int(H.sum())
        HA = A @ H
        sufmin = [A[i:].min(axis=0) for i in range(r)]
        sufHA = [HA[i:].min() for i in range(r)]
    else:
        inc = None
    S = np.zeros((1, c), dtype=A.dtype)
    used = np.zeros(1, dtype=np.int64)
    ks = np.arange(N + 1)
    for i in range(r - 1):
        si, kk = np.nonzero(ks[None, :] <= (N - used)[:, None])
        S = S[si] + kk[:, None].astype(A.dtype) * A[i]
        used = used[si] + kk
        if prune:
            rest = N - used
            keep = (S + rest[:, None].astype(A.dtype) * sufmin[i + 1]).max(axis=1) < inc
            keep &= S @ H + rest.astype(A.dtype) * sufHA[i + 1] < inc * Hs
            S, used = S[keep], used[keep]
    if len(S):
        final = int((S + (N - used)[:, None].astype(A.dtype) * A[r - 1]).max(axis=1).min())
        inc = final if inc is None else min(inc, final)
    return inc


def grid_minimax(A: FamilyMatrix, N: int) -> Fraction:
    """``min`` over grid mixtures ``m`` with ``N m ∈ Z`` of ``max_x Σ_f m(f) f(x)``."""
    if isinstance(N, bool) or int(N) != N or N <= 0:
        raise ValueError(f"resolution must be a positive integer, got {N!r}")
    N = int(N)
    M, den = _integer_matrix(A, N)
    plain = comb(N + len(A.rows) - 1, len(A.rows) - 1) <= PLAIN_LIMIT
    return Fraction(_grid_search(M, N, prune=not plain), N * den)


def grid_tolerance(A: FamilyMatrix, N: int) -> Fraction:
    """The a priori bound ``(max - min) |F| / N`` on the grid error."""
    flat = [v for row in A.values for v in row]
    return (max(flat) - min(flat)) * len(A.rows) / N


def _compositions(total: int, parts: int):
    for cuts in itertools.combinations(range(total + parts - 1), parts - 1):
        prev, out = -1, []
        for c in cuts:
            out.append(c - prev - 1)
            prev = c
        out.append(total + parts - 2 - prev)
        yield out


def enumerate_balance(inst: DominationInstance, max_support: int, points=None):
    """Worst balance margin over collections of point-mass pairs.

    Scans every multiset of at most ``max_support`` pairs ``(g, δ_x)``,
    with ``x`` restricted to ``points`` when given.  For a fixed multiset of
    points the worst choice of ``g`` at each copy of ``x`` is ``max_g g(x)``,
    so only the point counts are enumerated.  Returns ``(margin, pairs)``
    where ``pairs`` lists ``(g, x, count)``; margin ``> 0`` is a violation.
    With no targets the margin is ``None``.
    """
    if max_support < 1:
        raise ValueError("max_support must be positive")
    if not inst.targets.rows:
        return None, []
    if points is not None:
        inst = DominationInstance(inst.family.restrict_cols(points), inst.targets.restrict_cols(points))
    cols = inst.points
    n = len(cols)
    total = sum(comb(k + n - 1, n - 1) for k in range(1, max_support + 1))
    if total > ENUMERATION_CAP:
        raise ValueError(f"enumeration of {total} multisets exceeds the cap of {ENUMERATION_CAP}")
    tcols = list(zip(*inst.targets.values))
    best_g = [max(range(len(inst.targets.rows)), key=lambda i: col[i]) for col in tcols]
    gmax = [col[i] for col, i in zip(tcols, best_g)]
    F = inst.family.values
    best = None
    for k in range(1, max_support + 1):
        for counts in _compositions(k, n):
            lhs = sum((c * v for c, v in zip(counts, gmax) if c), Fraction(0))
            rhs = max(sum((c * v for c, v in zip(counts, row) if c), Fraction(0)) for row in F)
            margin = lhs - rhs
            if best is None or margin > best[0]:
                best = (margin, counts)
    margin, counts = best
    pairs = [(inst.targets.rows[best_g[j]], cols[j], c) for j, c in enumerate(counts) if c]
    return margin, pairs


def support_budget(inst: DominationInstance, budget: int = 20_000) -> int:
    """Largest ``max_support`` whose enumeration stays within ``budget`` multisets."""
    n = len(inst.points)
    k, total = 0, 0
    while total + comb(k + n, n - 1) <= budget:
        k += 1
        total += comb(k + n - 1, n - 1)
    return max(k, 1)


def balance_margin(inst: DominationInstance, pairs) -> Fraction:
    """``lhs - rhs`` of the balance inequality for ``(g, x, count)`` triples."""
    total = [Fraction(0)] * len(inst.points)
    lhs = Fraction(0)
    for g, x, c in pairs:
        j = inst.family.col_index[x]
        lhs += c * inst.targets.row(g)[j]
        total[j] += c
    rhs = max(sum((t * v for t, v in zip(total, row)), Fraction(0)) for row in inst.family.values)
    return lhs - rhs


def point_mass_form(violation) -> list[tuple[str, str, int]]:
    """Rewrite a balance certificate as integer counts of point-mass pairs.

    Each side of the inequality is linear in the pooled measure per target,
    so clearing denominators scales both sides by the same positive factor.
    """
    pooled: dict[tuple[str, str], Fraction] = {}
    for g, delta, n in violation.pairs:
        for x, w in delta.weights:
            pooled[(g, x)] = pooled.get((g, x), Fraction(0)) + n * w
    den = math.lcm(*(v.denominator for v in pooled.values()))
    counts = {key: int(v * den) for key, v in pooled.items() if v}
    div = math.gcd(*counts.values())
    return [(g, x, c // div) for (g, x), c in sorted(counts.items())]


def compact_counts(inst: DominationInstance, pairs, limit: int = 200) -> list[tuple[str, str, int]] | None:
    """A violation with the fewest point masses obtainable by rescaling ``pairs``.

    Counts are pooled per point with the largest target there, then scaled
    to totals ``K = 1, 2, ..., limit`` and rounded; the first rounding that
    still violates is returned, or None.  Violating count vectors form an
    open cone, so some ``K`` works whenever ``pairs`` violates.
    """
    tcols = list(zip(*inst.targets.values))
    best_g = {x: inst.targets.rows[max(range(len(col)), key=col.__getitem__)] for x, col in zip(inst.points, tcols)}
    pooled: dict[str, int] = {}
    for _, x, c in pairs:
        pooled[x] = pooled.get(x, 0) + c
    total = sum(pooled.values())
    for K in range(1, limit + 1):
        cand = [(best_g[x], x, round(Fraction(c * K, total))) for x, c in pooled.items()]
        cand = [t for t in cand if t[2] > 0]
        if cand and balance_margin(inst, cand) > 0:
            return cand
    return None


def float_pietsch(T, p: float, net, sample, norm: str = "linf") -> dict:
    """Floating-point net-relaxed Pietsch constant for arbitrary real ``p``."""
    T = np.array([[float(v) for v in r] for r in T])
    net = np.array([[float(v) for v in r] for r in net])
    X = np.array([[float(v) for v in r] for r in sample])
    F = np.abs(net @ X.T) ** p
    ords = {"linf": np.inf, "l1": 1, "l2": 2}
    if norm not in ords:
        raise ValueError(f"unknown norm {norm!r}")
    g = np.linalg.norm(X @ T.T, ord=ords[norm], axis=1) ** p
    if np.any((g > 0) & (F.max(axis=0) == 0)):
        j = int(np.nonzero((g > 0) & (F.max(axis=0) == 0))[0][0])
        return {"finite": False, "witness": f"s{j + 1}"}
    if not np.any(g > 0):
        return {"finite": True, "C": 0.0, "m": {"n1": 1.0}, "dual": [1.0] * len(g)}
    res = linprog(np.ones(len(net)), A_ub=-F.T, b_ub=-g, bounds=[(0, None)] * len(net), method="highs")
    if res.status != 0:
        raise RuntimeError(f"floating LP failed: {res.message}")
    C = float(res.fun)
    mu = res.x / C
    return {
        "finite": True,
        "C": C,
        "m": {f"n{i + 1}": float(v) for i, v in enumerate(mu) if v > 0},
        "dual": [float(-v) for v in res.ineqlin.marginals],
    }


def float_hull_value(A: FamilyMatrix) -> float:
    """Floating hull minimax value, for cross-checks."""
    M = np.array([[float(v) for v in row] for row in A.values])
    m, _ = _float_mixture(M)
    return float((m @ M).max())


def float_check(certificate, instance, tolerance: float = 1e-9) -> bool:
    """Re-verify a certificate in floating point within ``tolerance``."""
    from .certificates import check_certificate

    return check_certificate(certificate, instance, tolerance=tolerance)

