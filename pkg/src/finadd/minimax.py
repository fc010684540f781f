"""Minimax values of a finite family and their certificates.

Rows of the matrix are the functions ``f ∈ F`` and columns the points
``x ∈ X``.  The three numbers of interest are

* ``lower = max_x min_f f(x)``,
* ``upper = min_f max_x f(x)``,
* ``hull  = min_{m ∈ Δ(F)} max_x Σ_f m(f) f(x)``, the value over the
  integral hull, which always lies between the other two.

``hull == lower`` whenever the family is concave-like on ``X``, and
``upper == lower`` if, in addition, the optimal mixture has a sub
barycentre among the rows.  On a finite set the "pseudo" versions of these
properties (with a ``2⁻ⁿ`` slack) coincide with the exact ones: any
sequence in a finite set has a constant subsequence.  Everything here
checks the exact versions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .core import DiscreteMeasure, FamilyMatrix, dot, integral, point_average
from .lp import EQ, GE, LE, LpError, StandardLp, expect_optimal


def lower_value(A: FamilyMatrix) -> Fraction:
    """``max_x min_f f(x)`` by direct scan."""
    return max(min(col) for col in zip(*A.values))


def upper_value(A: FamilyMatrix) -> Fraction:
    """``min_f max_x f(x)`` by direct scan."""
    return min(max(row) for row in A.values)


def attaining_point(A: FamilyMatrix) -> str:
    """First column at which ``min_f f(x)`` reaches :func:`lower_value`."""
    target = lower_value(A)
    return next(x for x, col in zip(A.cols, zip(*A.values)) if min(col) == target)


class HullMinimax(NamedTuple):
    value: Fraction
    measure: DiscreteMeasure


class GameValue(NamedTuple):
    value: Fraction
    measure: DiscreteMeasure
    point_weights: DiscreteMeasure


def _mixture_lp(payoff: Sequence[Sequence[Fraction]]) -> StandardLp:
    """``min t`` s.t. ``Σ_i w_i payoff[i][k] <= t`` for all k, ``w ∈ Δ``; variables ``(w, t)``."""
    n = len(payoff)
    ncon = len(payoff[0])
    matrix = [[payoff[i][k] for i in range(n)] + [Fraction(-1)] for k in range(ncon)]
    matrix.append([Fraction(1)] * n + [Fraction(0)])
    return StandardLp(
        objective=(Fraction(0),) * n + (Fraction(1),),
        matrix=matrix,
        relations=(LE,) * ncon + (EQ,),
        rhs=(Fraction(0),) * ncon + (Fraction(1),),
        lower=(Fraction(0),) * n + (None,),
        sense="min",
    )


def _guarantee_lp(payoff: Sequence[Sequence[Fraction]]) -> StandardLp:
    """``max s`` s.t. ``Σ_k λ_k payoff[i][k] >= s`` for all i, ``λ ∈ Δ``; variables ``(λ, s)``."""
    nrows = len(payoff)
    n = len(payoff[0])
    matrix = [list(payoff[i]) + [Fraction(-1)] for i in range(nrows)]
    matrix.append([Fraction(1)] * n + [Fraction(0)])
    return StandardLp(
        objective=(Fraction(0),) * n + (Fraction(1),),
        matrix=matrix,
        relations=(GE,) * nrows + (EQ,),
        rhs=(Fraction(0),) * nrows + (Fraction(1),),
        lower=(Fraction(0),) * n + (None,),
        sense="max",
    )


def hull_minimax(A: FamilyMatrix) -> HullMinimax:
    """``min_{m ∈ Δ(F)} max_x ∫ f(x) m(df)`` with an attaining ``m``.

    Solved as the LP ``min t`` subject to ``Σ_f m(f) f(x) <= t``.  The
    minimum is always attained on a finite family.
    """
    out = expect_optimal(_mixture_lp(A.values))
    weights = out.primal[: len(A.rows)]
    return HullMinimax(out.value, DiscreteMeasure.from_vector(A.rows, weights))


def game_value(A: FamilyMatrix, generators: Sequence[DiscreteMeasure] | None = None) -> GameValue:
    """Value of the bilinear game between ``intr(F)`` and ``H = conv(generators)``.

    ``H`` defaults to ``Δ(X)`` (generated by the point masses).  Both sides
    are solved as separate LPs,

        min_{m ∈ Δ(F)} max_k ⟨Σ m(f) f, h_k⟩   and   max_{λ ∈ Δ} min_f ⟨f, Σ λ_k h_k⟩,

    and their values must agree exactly; the returned value is the one of
    the second (guarantee) problem.
    """
    if generators is None:
        generators = [DiscreteMeasure.point_mass(x) for x in A.cols]
    generators = list(generators)
    if not generators:
        raise ValueError("game_value needs at least one generator")
    for k, h in enumerate(generators):
        for x in h.support:
            if x not in A.col_index:
                raise KeyError(f"generator {k} charges unknown point {x!r}")
    payoff = [
        [sum((w * row[A.col_index[x]] for x, w in h.weights), Fraction(0)) for h in generators]
        for row in A.values
    ]
    mix = expect_optimal(_mixture_lp(payoff))
    guard = expect_optimal(_guarantee_lp(payoff))
    if mix.value != guard.value:
        raise LpError(f"duality gap {mix.value} vs {guard.value}")
    measure = DiscreteMeasure.from_vector(A.rows, mix.primal[: len(A.rows)])
    lam = guard.primal[: len(generators)]
    h: dict[str, Fraction] = {}
    for lk, gen in zip(lam, generators):
        if lk:
            for x, w in gen.weights:
                h[x] = h.get(x, Fraction(0)) + lk * w
    point_weights = DiscreteMeasure(tuple((x, h[x]) for x in A.cols if x in h))
    return GameValue(guard.value, measure, point_weights)


@dataclass(frozen=True)
class ConcavityViolation:
    """Points ``x, x2`` and an open ``t``-interval no column dominates.

    For every ``t`` strictly inside ``(lo, hi)`` there is no column ``x''``
    with ``t f(x) + (1-t) f(x2) <= f(x'')`` for all rows ``f``.
    """

    x: str
    x2: str
    lo: Fraction
    hi: Fraction

    @property
    def sample_t(self) -> Fraction:
        return (self.lo + self.hi) / 2


def dominated_interval(
    a: Sequence[Fraction], b: Sequence[Fraction], c: Sequence[Fraction]
) -> tuple[Fraction, Fraction] | None:
    """Closed set ``{t ∈ [0,1] : t a_f + (1-t) b_f <= c_f ∀f}`` as ``(lo, hi)`` or None."""
    lo, hi = Fraction(0), Fraction(1)
    for af, bf, cf in zip(a, b, c):
        slope, room = af - bf, cf - bf
        if slope > 0:
            hi = min(hi, room / slope)
        elif slope < 0:
            lo = max(lo, room / slope)
        elif room < 0:
            return None
        if lo > hi:
            return None
    return lo, hi


def _first_gap(intervals: list[tuple[Fraction, Fraction]]) -> tuple[Fraction, Fraction] | None:
    reach = Fraction(0)
    for lo, hi in sorted(intervals):
        if lo > reach:
            return reach, lo
        reach = max(reach, hi)
        if reach >= 1:
            return None
    return reach, Fraction(1)


def is_concave_like(A: FamilyMatrix) -> tuple[bool, ConcavityViolation | None]:
    """Decide exactly whether every mixture of two columns is dominated by a column.

    For each pair of columns the dominated ``t``-sets (one closed interval per
    candidate column) must cover ``[0, 1]``.  Unordered pairs suffice since
    swapping the pair maps ``t`` to ``1 - t``.
    """
    for i in range(len(A.cols)):
        for j in range(i + 1, len(A.cols)):
            gap = first_uncovered(A, A.cols[i], A.cols[j])
            if gap is not None:
                return False, ConcavityViolation(A.cols[i], A.cols[j], gap[0], gap[1])
    return True, None


def first_uncovered(A: FamilyMatrix, x: str, x2: str) -> tuple[Fraction, Fraction] | None:
    """Leftmost open ``t``-interval where no column dominates ``t x + (1-t) x2``."""
    a, b = A.column(x), A.column(x2)
    cols = [tuple(col) for col in zip(*A.values)]
    return _first_gap([iv for c in cols if (iv := dominated_interval(a, b, c))])


def find_sub_barycentre(A: FamilyMatrix, m: DiscreteMeasure) -> str | None:
    """A column ``x*`` with ``f(x*) <= Σ_x m(x) f(x)`` for every row, or None.

    Support points of ``m`` are tried first, then the remaining columns in
    order.
    """
    for x in m.support:
        if x not in A.col_index:
            raise KeyError(f"measure charges unknown point {x!r}")
    bary = point_average(m, A)
    candidates = list(m.support) + [x for x in A.cols if x not in m.as_dict]
    for x in candidates:
        j = A.col_index[x]
        if all(row[j] <= v for row, v in zip(A.values, bary)):
            return x
    return None


class LocalMinimax(NamedTuple):
    value: Fraction
    measure: DiscreteMeasure
    index: int


def local_minimax(A: FamilyMatrix, subfamilies: Sequence[Sequence[str]]) -> LocalMinimax:
    """``inf_α`` of the hull value over mixtures charging only ``F_α``.

    The attaining measure lives on the best subfamily and is zero elsewhere.
    Ties go to the first index.
    """
    if not subfamilies:
        raise ValueError("local_minimax needs at least one subfamily")
    best: LocalMinimax | None = None
    for k, sub in enumerate(subfamilies):
        if not sub:
            raise ValueError(f"subfamily {k} is empty")
        res = hull_minimax(A.restrict_rows(sub))
        if best is None or res.value < best.value:
            best = LocalMinimax(res.value, res.measure, k)
    return best


def local_lower_value(A: FamilyMatrix, subfamilies: Sequence[Sequence[str]]) -> Fraction:
    """``min_α max_x min_{f ∈ F_α} f(x)``, the right-hand side of the local identity."""
    return min(lower_value(A.restrict_rows(sub)) for sub in subfamilies)


@dataclass(frozen=True)
class MinimaxReport:
    lower: Fraction
    upper: Fraction
    hull_value: Fraction
    optimal_measure: DiscreteMeasure
    point_weights: DiscreteMeasure
    attaining_point: str
    concave_like: bool | None = None
    concavity_violation: ConcavityViolation | None = None
    sub_barycentre: str | None = None

    def to_json(self) -> dict:
        out = {
            "lower": self.lower,
            "upper": self.upper,
            "hull_value": self.hull_value,
            "optimal_measure": self.optimal_measure,
            "point_weights": self.point_weights,
            "attaining_point": self.attaining_point,
            "sub_barycentre": self.sub_barycentre,
        }
        if self.concave_like is not None:
            out["concave_like"] = self.concave_like
        if self.concavity_violation is not None:
            v = self.concavity_violation
            out["concavity_violation"] = {"x": v.x, "x2": v.x2, "lo": v.lo, "hi": v.hi}
        return out


def minimax_report(A: FamilyMatrix, check_concave: bool = True) -> MinimaxReport:
    """All minimax quantities of ``A`` with their witnesses.

    ``sub_barycentre`` is a row ``f*`` lying below the optimal mixture at
    every point (a sub barycentre in the transposed orientation); when it
    exists, ``max_x f*(x) <= hull_value`` and the upper value collapses onto
    the hull value.
    """
    hull = hull_minimax(A)
    game = game_value(A)
    concave, violation = is_concave_like(A) if check_concave else (None, None)
    return MinimaxReport(
        lower=lower_value(A),
        upper=upper_value(A),
        hull_value=hull.value,
        optimal_measure=hull.measure,
        point_weights=game.point_weights,
        attaining_point=attaining_point(A),
        concave_like=concave,
        concavity_violation=violation,
        sub_barycentre=find_sub_barycentre(A.transpose(), hull.measure),
    )


def mixture_max(A: FamilyMatrix, m: DiscreteMeasure) -> Fraction:
    """``max_x Σ_f m(f) f(x)``."""
    return max(integral(m, A))


def guarantee(A: FamilyMatrix, h: DiscreteMeasure) -> Fraction:
    """``min_f ⟨f, h⟩``."""
    return min(dot(row, h.vector(A.cols)) for row in A.values)
