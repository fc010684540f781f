"""Domination by mixtures, balancedness, hull membership and Fan's case.

Given families ``F`` and ``G`` on the same finite set, either some mixture
``m ∈ Δ(F)`` dominates every ``g ∈ G`` pointwise, or a finite collection of
pairs ``(g_i, δ_i)`` violates

    Σ_i ⟨g_i, δ_i⟩ <= max_f ⟨f, Σ_i δ_i⟩.

Exactly one branch holds; the second is produced from the Farkas ray of
the infeasible LP.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd, lcm
from typing import Iterable, Sequence

from .core import ParseError, DiscreteMeasure, FamilyMatrix, dot, integral, to_vector
from .lp import EQ, GE, Infeasible, LpError, Optimal, StandardLp, solve


@dataclass(frozen=True)
class DominationInstance:
    family: FamilyMatrix
    targets: FamilyMatrix

    def __post_init__(self) -> None:
        if set(self.family.cols) != set(self.targets.cols):
            raise ValueError("family and targets must be defined on the same points")
        if self.targets.cols != self.family.cols:
            object.__setattr__(self, "targets", self.targets.restrict_cols(self.family.cols))

    @property
    def points(self) -> tuple[str, ...]:
        return self.family.cols

    def to_json(self) -> dict:
        out = self.family.to_json()
        out["targets"] = self.targets.to_json()["functions"]
        return out

    @classmethod
    def from_json(cls, data) -> "DominationInstance":
        family = FamilyMatrix.from_json(data)
        if "targets" not in data:
            raise ParseError("missing 'targets' list", "targets")
        targets = FamilyMatrix.from_json(
            {"points": data["points"], "functions": data["targets"]}, path="", allow_empty=True
        )
        return cls(family, targets)


@dataclass(frozen=True)
class Dominated:
    measure: DiscreteMeasure


@dataclass(frozen=True)
class BalanceViolation:
    """Pairs ``(g, δ, n)`` meaning ``n`` copies of ``(g, δ)``.

    ``lhs = Σ n ⟨g, δ⟩`` and ``rhs = max_f ⟨f, Σ n δ⟩``; a genuine
    violation has ``lhs > rhs``.
    """

    pairs: tuple[tuple[str, DiscreteMeasure, int], ...]
    lhs: Fraction
    rhs: Fraction

    @property
    def margin(self) -> Fraction:
        return self.lhs - self.rhs


def balance_sides(
    inst: DominationInstance, pairs: Iterable[tuple]
) -> tuple[Fraction, Fraction]:
    """Both sides of the balance inequality for the given finite collection.

    Each pair is ``(g_label, δ)`` or ``(g_label, δ, multiplicity)``; every
    ``δ`` must be a probability on the points.
    """
    cols = inst.points
    total = [Fraction(0)] * len(cols)
    lhs = Fraction(0)
    for item in pairs:
        g, delta = item[0], item[1]
        n = item[2] if len(item) > 2 else 1
        if int(n) != n or n < 1:
            raise ValueError(f"multiplicity must be a positive integer, got {n}")
        if not delta.is_probability:
            raise ValueError(f"δ paired with {g!r} is not a probability")
        dvec = delta.vector(cols)
        for x in delta.support:
            if x not in inst.family.col_index:
                raise KeyError(f"δ charges unknown point {x!r}")
        lhs += n * dot(inst.targets.row(g), dvec)
        for j, w in enumerate(dvec):
            total[j] += n * w
    rhs = max(dot(row, total) for row in inst.family.values)
    return lhs, rhs


def verify_balance(inst: DominationInstance, pairs: Iterable[tuple]) -> bool:
    """Evaluate the balance inequality exactly on one finite collection of pairs."""
    pairs = list(pairs)
    if not pairs:
        return True
    lhs, rhs = balance_sides(inst, pairs)
    return lhs <= rhs


def verify_dominating(inst: DominationInstance, m: DiscreteMeasure) -> bool:
    """``g(x) <= Σ_f m(f) f(x)`` for every target and point, with ``m`` a probability."""
    if not m.is_probability:
        return False
    mix = integral(m, inst.family)
    return all(v <= w for row in inst.targets.values for v, w in zip(row, mix))


def _domination_lp(inst: DominationInstance) -> StandardLp:
    F, G = inst.family, inst.targets
    nf = len(F.rows)
    matrix = [[Fraction(1)] * nf]
    rhs = [Fraction(1)]
    for grow in G.values:
        for j, gv in enumerate(grow):
            matrix.append([frow[j] for frow in F.values])
            rhs.append(gv)
    return StandardLp(
        objective=(Fraction(0),) * nf,
        matrix=matrix,
        relations=(EQ,) + (GE,) * (len(matrix) - 1),
        rhs=rhs,
    )


def ray_to_pairs(
    inst: DominationInstance, ray: Sequence[Fraction]
) -> tuple[tuple[str, DiscreteMeasure, int], ...]:
    """Group a Farkas ray ``y(g, x) >= 0`` by target into ``(g, δ_g, n_g)``.

    ``δ_g = y(g, ·) / Σ_x y(g, x)`` and the masses ``Σ_x y(g, x)`` are
    scaled by their common denominator (then divided by the gcd) to give
    integer multiplicities.
    """
    cols = inst.points
    per_g = []
    k = 1
    for g in inst.targets.rows:
        ys = ray[k : k + len(cols)]
        k += len(cols)
        mass = sum(ys, Fraction(0))
        if mass > 0:
            per_g.append((g, DiscreteMeasure.from_vector(cols, [y / mass for y in ys]), mass))
    scale = lcm(*(mass.denominator for _, _, mass in per_g))
    counts = [int(mass * scale) for _, _, mass in per_g]
    common = 0
    for c in counts:
        common = gcd(common, c)
    return tuple((g, delta, c // common) for (g, delta, _), c in zip(per_g, counts))


def find_dominating_measure(inst: DominationInstance) -> Dominated | BalanceViolation:
    """A mixture of ``F`` dominating every ``g ∈ G``, or a balancedness violation."""
    lp = _domination_lp(inst)
    out = solve(lp)
    if isinstance(out, Optimal):
        return Dominated(DiscreteMeasure.from_vector(inst.family.rows, out.primal))
    if not isinstance(out, Infeasible):
        raise LpError(f"domination LP reported {out.status}")
    pairs = ray_to_pairs(inst, out.ray)
    lhs, rhs = balance_sides(inst, pairs)
    if not lhs > rhs:
        raise LpError("Farkas ray did not convert into a balance violation")
    return BalanceViolation(pairs, lhs, rhs)


def pointwise_max_reduction(inst: DominationInstance) -> DominationInstance:
    """Replace the targets by their single pointwise maximum (same constraint set)."""
    top = tuple(max(col) for col in zip(*inst.targets.values))
    return DominationInstance(inst.family, FamilyMatrix(("max_g",), inst.points, (top,)))


# -- integral hull ------------------------------------------------------------


@dataclass(frozen=True)
class InHull:
    measure: DiscreteMeasure


@dataclass(frozen=True)
class NotInHull:
    """A weighting ``w`` over points with ``⟨g, w⟩ > max_f ⟨f, w⟩``, normalised to ``Σ|w| = 1``."""

    weights: tuple[tuple[str, Fraction], ...]
    target_value: Fraction
    family_max: Fraction

    def vector(self, cols: Sequence[str]) -> tuple[Fraction, ...]:
        d = dict(self.weights)
        return tuple(d.get(x, Fraction(0)) for x in cols)


def separation_sides(A: FamilyMatrix, g: Sequence[Fraction], w: Sequence[Fraction]):
    return dot(g, w), max(dot(row, w) for row in A.values)


def hull_membership(A: FamilyMatrix, g: Sequence) -> InHull | NotInHull:
    """Decide whether ``g`` is a mixture of the rows of ``A``.

    On a finite set the integral hull is the plain convex hull, so this is
    the equality-constrained LP ``Σ_f m(f) f = g``, ``m ∈ Δ(F)``.
    """
    g = A.vector(g)
    nf = len(A.rows)
    matrix = [[Fraction(1)] * nf] + [[row[j] for row in A.values] for j in range(len(A.cols))]
    lp = StandardLp((Fraction(0),) * nf, matrix, (EQ,) * len(matrix), (Fraction(1),) + g)
    out = solve(lp)
    if isinstance(out, Optimal):
        return InHull(DiscreteMeasure.from_vector(A.rows, out.primal))
    if not isinstance(out, Infeasible):
        raise LpError(f"hull LP reported {out.status}")
    w = list(out.ray[1:])
    norm = sum((abs(v) for v in w), Fraction(0))
    w = [v / norm for v in w]
    tv, fm = separation_sides(A, g, w)
    if not tv > fm:
        raise LpError("Farkas ray did not separate the target from the hull")
    return NotInHull(tuple((x, v) for x, v in zip(A.cols, w) if v), tv, fm)


def symmetrized_instance(A: FamilyMatrix, g: Sequence[Fraction]) -> DominationInstance:
    """Domination instance on doubled points whose dominating measures hit ``g`` exactly.

    Each point ``x`` is split into ``x+`` and ``x-``; a row ``f`` becomes
    ``(f, -f)`` and the target ``(g, -g)``.  A single mixture dominating
    both halves satisfies ``∫ f dm >= g`` and ``-∫ f dm >= -g``, hence
    equality.
    """
    g = tuple(Fraction(v) for v in g)
    cols = tuple(f"{x}+" for x in A.cols) + tuple(f"{x}-" for x in A.cols)
    fam = FamilyMatrix(A.rows, cols, tuple(row + tuple(-v for v in row) for row in A.values))
    tgt = FamilyMatrix(("g",), cols, (g + tuple(-v for v in g),))
    return DominationInstance(fam, tgt)


def hull_membership_via_domination(A: FamilyMatrix, g: Sequence[Fraction]) -> bool:
    return isinstance(find_dominating_measure(symmetrized_instance(A, g)), Dominated)


# -- Fan's theorem for polyhedral norms ---------------------------------------


def norm(v: Sequence[Fraction], kind: str) -> Fraction:
    if kind == "l1":
        return sum((abs(a) for a in v), Fraction(0))
    if kind == "linf":
        return max((abs(a) for a in v), default=Fraction(0))
    raise ValueError(f"unsupported norm {kind!r}; exact mode handles 'l1' and 'linf'")


def dual_norm_kind(kind: str) -> str:
    return {"l1": "linf", "linf": "l1"}[kind]


@dataclass(frozen=True)
class LinearFunctional:
    phi: tuple[Fraction, ...]


@dataclass(frozen=True)
class FanViolation:
    """Weights ``p >= 0``, ``Σp <= 1``, with ``Σ p_i g(x_i) > ρ ‖Σ p_i x_i‖``."""

    weights: tuple[Fraction, ...]
    lhs: Fraction
    rhs: Fraction


def fan_sides(points, g, rho, kind, p) -> tuple[Fraction, Fraction]:
    d = len(points[0])
    combo = [sum((pi * x[k] for pi, x in zip(p, points)), Fraction(0)) for k in range(d)]
    return dot(p, g), Fraction(rho) * norm(combo, kind)


def verify_fan_functional(points, g, rho, kind, phi) -> bool:
    if norm(phi, dual_norm_kind(kind)) > rho:
        return False
    return all(gi <= dot(phi, x) for gi, x in zip(g, points))


def verify_fan_violation(points, g, rho, kind, p) -> bool:
    if any(pi < 0 for pi in p) or sum(p, Fraction(0)) > 1:
        return False
    lhs, rhs = fan_sides(points, g, rho, kind, p)
    return lhs > rhs


def fan_norm_domination(
    points: Sequence[Sequence], g: Sequence, rho, kind: str = "l1"
) -> LinearFunctional | FanViolation:
    """A functional ``φ`` with ``‖φ‖_* <= ρ`` and ``g(x_i) <= ⟨φ, x_i⟩``, or a violation.

    ``kind`` is the norm on the points; its dual norm bounds ``φ``.  The
    violation weights follow the displayed condition literally and only
    need ``Σ p_i <= 1``.
    """
    if not points:
        raise ValueError("fan_norm_domination needs at least one point")
    points = [to_vector(x) for x in points]
    g = to_vector(g)
    rho = Fraction(rho)
    if rho <= 0:
        raise ValueError("rho must be positive")
    d = len(points[0])
    if any(len(x) != d for x in points) or len(g) != len(points):
        raise ValueError("dimension mismatch")
    n = len(points)
    if kind == "l1":
        # dual norm l∞: box bounds on φ
        lp = StandardLp(
            (Fraction(0),) * d,
            [list(x) for x in points],
            (GE,) * n,
            g,
            lower=(-rho,) * d,
            upper=(rho,) * d,
        )
        out = solve(lp)
        if isinstance(out, Optimal):
            return LinearFunctional(out.primal)
    elif kind == "linf":
        # dual norm l1: φ = φ⁺ − φ⁻, Σ(φ⁺ + φ⁻) <= ρ
        matrix = [list(x) + [-v for v in x] for x in points]
        matrix.append([Fraction(-1)] * (2 * d))
        lp = StandardLp((Fraction(0),) * (2 * d), matrix, (GE,) * (n + 1), list(g) + [-rho])
        out = solve(lp)
        if isinstance(out, Optimal):
            x = out.primal
            return LinearFunctional(tuple(x[k] - x[d + k] for k in range(d)))
    else:
        raise ValueError(f"unsupported norm {kind!r}; exact mode handles 'l1' and 'linf'")
    if not isinstance(out, Infeasible):
        raise LpError(f"Fan LP reported {out.status}")
    y = out.ray[:n]
    total = sum(y, Fraction(0))
    p = tuple(v / total for v in y)
    lhs, rhs = fan_sides(points, g, rho, kind, p)
    if not lhs > rhs:
        raise LpError("Farkas ray did not yield a Fan violation")
    return FanViolation(p, lhs, rhs)


# -- marginals ----------------------------------------------------------------


def product_targets(
    factors: Sequence[Sequence[str]], marginals: Sequence[tuple[int, str, Sequence]]
) -> FamilyMatrix:
    """Targets ``g_α ∘ π_α`` on the product of the factor sets.

    ``marginals`` lists ``(coordinate, name, values on that factor)``.
    Product points are labelled by joining the factor labels with ``","``.
    The common-extension question then becomes an ordinary
    :class:`DominationInstance` with a family on the same product points.
    """
    pts = list(product(*factors))
    labels = tuple(",".join(p) for p in pts)
    rows, values = [], []
    for coord, name, vals in marginals:
        vals = to_vector(vals)
        if len(vals) != len(factors[coord]):
            raise ValueError(f"marginal {name!r} has wrong length")
        index = {lab: i for i, lab in enumerate(factors[coord])}
        rows.append(name)
        values.append(tuple(vals[index[p[coord]]] for p in pts))
    return FamilyMatrix(tuple(rows), labels, tuple(values))
