"""Sufficient subsets, representing measures and polyhedral Strassen decompositions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .core import DiscreteMeasure, FamilyMatrix, ParseError, dot, to_vector
from .lp import EQ, GE, LE, Infeasible, LpError, Optimal, StandardLp, solve


@dataclass(frozen=True)
class SufficiencyInstance:
    functions: FamilyMatrix
    subset: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "subset", tuple(self.subset))
        if not self.subset:
            raise ValueError("the candidate subset Z must be non-empty")
        unknown = [z for z in self.subset if z not in self.functions.col_index]
        if unknown:
            raise ValueError(f"subset contains unknown points {unknown}")


@dataclass(frozen=True)
class Sufficient:
    """Every point passed; ``margins[x]`` is the (nonpositive) optimal gap at ``x``."""

    margins: tuple[tuple[str, Fraction], ...]


@dataclass(frozen=True)
class SufficiencyViolation:
    """``Σ_h δ(h) h(x) - max_{z ∈ Z} Σ_h δ(h) h(z) = margin > 0``."""

    point: str
    delta: DiscreteMeasure
    margin: Fraction


def sufficiency_margin(H: FamilyMatrix, subset: Sequence[str], x: str, delta: DiscreteMeasure) -> Fraction:
    """``⟨δ-mixture⟩(x) - max_{z ∈ Z} ⟨δ-mixture⟩(z)``."""
    mix = dict(zip(H.cols, _row_mixture(H, delta)))
    return mix[x] - max(mix[z] for z in subset)


def _row_mixture(H: FamilyMatrix, delta: DiscreteMeasure) -> tuple[Fraction, ...]:
    out = [Fraction(0)] * len(H.cols)
    for h, w in delta.weights:
        for j, v in enumerate(H.row(h)):
            out[j] += w * v
    return tuple(out)


def check_sufficiency(inst: SufficiencyInstance) -> Sufficient | SufficiencyViolation:
    """Test ``Z`` against every ``δ ∈ Δ(H)`` at every point outside ``Z``.

    For each such ``x`` the LP ``max Σ δ(h) h(x) - s`` with
    ``s >= Σ δ(h) h(z)`` for ``z ∈ Z`` finds the worst mixture; ``Z`` is
    sufficient iff no optimum is positive.  The first positive one is
    returned.
    """
    H, Z = inst.functions, inst.subset
    nh = len(H.rows)
    zset = set(Z)
    margins = []
    for x in H.cols:
        if x in zset:
            continue
        jx = H.col_index[x]
        matrix = [[Fraction(1)] * nh + [Fraction(0)]]
        for z in Z:
            jz = H.col_index[z]
            matrix.append([row[jz] for row in H.values] + [Fraction(-1)])
        lp = StandardLp(
            objective=tuple(row[jx] for row in H.values) + (Fraction(-1),),
            matrix=matrix,
            relations=(EQ,) + (LE,) * len(Z),
            rhs=(Fraction(1),) + (Fraction(0),) * len(Z),
            lower=(Fraction(0),) * nh + (None,),
        )
        out = solve(lp)
        if not isinstance(out, Optimal):
            raise LpError(f"sufficiency LP at {x!r} reported {out.status}")
        if out.value > 0:
            delta = DiscreteMeasure.from_vector(H.rows, out.primal[:nh])
            return SufficiencyViolation(x, delta, sufficiency_margin(H, Z, x, delta))
        margins.append((x, out.value))
    return Sufficient(tuple(margins))


@dataclass(frozen=True)
class NoRepresentation:
    """No measure on the subset represents ``point``; ``delta`` witnesses why."""

    point: str
    delta: DiscreteMeasure
    margin: Fraction


def _ordered_chain(chain: Sequence[Sequence[str]], cols) -> list[tuple[str, ...]]:
    members = sorted((tuple(z) for z in chain), key=len)
    for z in members:
        if not z:
            raise ValueError("chain members must be non-empty")
        if any(p not in cols for p in z):
            raise ValueError("chain member contains unknown points")
    for small, big in zip(members, members[1:]):
        if not set(small) <= set(big):
            raise ValueError("chain is not linearly ordered by inclusion")
    return members


def verify_representing(H: FamilyMatrix, x: str, m: DiscreteMeasure, subset: Sequence[str]) -> bool:
    """``m`` is a probability on ``subset`` and ``h(x) <= Σ_z m(z) h(z)`` for all ``h``."""
    if not m.is_probability or not set(m.support) <= set(subset):
        return False
    jx = H.col_index[x]
    avg = _point_average(H, m)
    return all(row[jx] <= a for row, a in zip(H.values, avg))


def _point_average(H: FamilyMatrix, m: DiscreteMeasure) -> tuple[Fraction, ...]:
    idx = [(H.col_index[z], w) for z, w in m.weights]
    return tuple(sum((w * row[j] for j, w in idx), Fraction(0)) for row in H.values)


def representing_measure(
    inst: SufficiencyInstance, x: str, chain: Sequence[Sequence[str]] | None = None
) -> DiscreteMeasure | NoRepresentation:
    """A probability on ``Z`` (or on the smallest chain member) representing ``x``.

    Solves ``h(x) <= Σ_z m(z) h(z)`` for all ``h``.  A finite chain has a
    least element, and a measure living there lives in every member.
    """
    H = inst.functions
    if x not in H.col_index:
        raise KeyError(f"unknown point {x!r}")
    target = _ordered_chain(chain, H.col_index)[0] if chain else inst.subset
    if x in target:
        return DiscreteMeasure.point_mass(x)
    jx = H.col_index[x]
    idx = [H.col_index[z] for z in target]
    matrix = [[Fraction(1)] * len(target)] + [[row[j] for j in idx] for row in H.values]
    rhs = (Fraction(1),) + tuple(row[jx] for row in H.values)
    lp = StandardLp(
        (Fraction(0),) * len(target), matrix, (EQ,) + (GE,) * len(H.rows), rhs
    )
    out = solve(lp)
    if isinstance(out, Optimal):
        return DiscreteMeasure.from_vector(target, out.primal)
    if not isinstance(out, Infeasible):
        raise LpError(f"representation LP reported {out.status}")
    ys = out.ray[1:]
    total = sum(ys, Fraction(0))
    delta = DiscreteMeasure.from_vector(H.rows, [y / total for y in ys])
    return NoRepresentation(x, delta, sufficiency_margin(H, target, x, delta))


# -- polyhedral sublinear functionals -----------------------------------------


@dataclass(frozen=True)
class PolyhedralSublinear:
    """``f(x) = max_j ⟨a_j, x⟩`` for finitely many generators ``a_j ∈ Q^d``."""

    name: str
    generators: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        gens = tuple(to_vector(a) for a in self.generators)
        if not gens:
            raise ValueError(f"functional {self.name!r} needs at least one generator")
        if len({len(a) for a in gens}) != 1:
            raise ValueError(f"generators of {self.name!r} differ in dimension")
        object.__setattr__(self, "generators", gens)

    @property
    def dimension(self) -> int:
        return len(self.generators[0])

    def __call__(self, x: Sequence[Fraction]) -> Fraction:
        return max(dot(a, x) for a in self.generators)


def functionals_from_json(data) -> list[PolyhedralSublinear]:
    if not isinstance(data, Mapping) or not isinstance(data.get("functionals"), list):
        raise ParseError("expected {'functionals': [{'name': ..., 'generators': [...]}]}")
    out = []
    for i, item in enumerate(data["functionals"]):
        where = f"functionals[{i}]"
        if not isinstance(item, Mapping) or "generators" not in item:
            raise ParseError("expected {'name': ..., 'generators': [[...], ...]}", where)
        gens = tuple(to_vector(a, f"{where}.generators[{j}]") for j, a in enumerate(item["generators"]))
        try:
            out.append(PolyhedralSublinear(str(item.get("name", f"f{i + 1}")), gens))
        except ValueError as exc:
            raise ParseError(str(exc), where) from None
    if not out:
        raise ParseError("at least one functional is required", "functionals")
    dims = {f.dimension for f in out}
    if "dimension" in data:
        dims.add(int(data["dimension"]))
    if len(dims) != 1:
        raise ParseError("functionals differ in dimension", "functionals")
    return out


def functionals_to_json(F: Sequence[PolyhedralSublinear]) -> dict:
    return {
        "dimension": F[0].dimension,
        "functionals": [{"name": f.name, "generators": [list(a) for a in f.generators]} for f in F],
    }


@dataclass(frozen=True)
class StrassenDominated:
    """Convex weights ``w[(f, j)]`` over all generators with ``Σ w a = φ``."""

    weights: tuple[tuple[str, int, Fraction], ...]


@dataclass(frozen=True)
class StrassenViolation:
    """``⟨φ, x⟩ > max_f f(x)``; ``x`` scaled so that ``max_k |x_k| = 1``."""

    x: tuple[Fraction, ...]
    phi_value: Fraction
    sup_value: Fraction


@dataclass(frozen=True)
class StrassenDecomposition:
    """``φ = Σ_f λ(f) t_f`` with each ``t_f = Σ_j c_{f,j} a_{f,j}`` in its generator hull."""

    lam: DiscreteMeasure
    t: tuple[tuple[str, tuple[Fraction, ...]], ...]
    hull_weights: tuple[tuple[str, tuple[Fraction, ...]], ...]


def _check_dims(phi, F) -> tuple[Fraction, ...]:
    phi = to_vector(phi)
    if not F:
        raise ValueError("at least one sublinear functional is required")
    for f in F:
        if f.dimension != len(phi):
            raise ValueError(f"functional {f.name!r} has dimension {f.dimension}, φ has {len(phi)}")
    return phi


def strassen_dominated(phi: Sequence, F: Sequence[PolyhedralSublinear]) -> StrassenDominated | StrassenViolation:
    """Decide ``⟨φ, x⟩ <= max_f f(x)`` for all ``x``.

    A linear functional sits below a finite max of linear functionals iff it
    lies in the convex hull of all their generators; the hull LP either gives
    the convex weights or a separating direction.
    """
    phi = _check_dims(phi, F)
    gens = [(f.name, j, a) for f in F for j, a in enumerate(f.generators)]
    d = len(phi)
    matrix = [[Fraction(1)] * len(gens)] + [[a[k] for _, _, a in gens] for k in range(d)]
    lp = StandardLp((Fraction(0),) * len(gens), matrix, (EQ,) * (d + 1), (Fraction(1),) + phi)
    out = solve(lp)
    if isinstance(out, Optimal):
        return StrassenDominated(tuple((name, j, w) for (name, j, _), w in zip(gens, out.primal) if w))
    if not isinstance(out, Infeasible):
        raise LpError(f"Strassen LP reported {out.status}")
    x = out.ray[1:]
    scale = max(abs(v) for v in x)
    x = tuple(v / scale for v in x)
    pv, sv = dot(phi, x), max(f(x) for f in F)
    if not pv > sv:
        raise LpError("Farkas ray did not separate φ")
    return StrassenViolation(x, pv, sv)


def strassen_decompose(phi: Sequence, F: Sequence[PolyhedralSublinear]) -> StrassenDecomposition | StrassenViolation:
    """Split ``φ`` into ``λ``-weighted linear minorants ``t_f <= f``.

    ``λ(f)`` is the hull mass on ``f``'s generators and ``t_f`` the
    normalised partial barycentre; functionals without mass get their first
    generator.  The exceptional null set is empty.
    """
    res = strassen_dominated(phi, F)
    if isinstance(res, StrassenViolation):
        return res
    by_f: dict[str, dict[int, Fraction]] = {}
    for name, j, w in res.weights:
        by_f.setdefault(name, {})[j] = w
    lam, t, hull = [], [], []
    for f in F:
        ws = by_f.get(f.name, {})
        mass = sum(ws.values(), Fraction(0))
        if mass > 0:
            coeffs = tuple(ws.get(j, Fraction(0)) / mass for j in range(len(f.generators)))
        else:
            coeffs = (Fraction(1),) + (Fraction(0),) * (len(f.generators) - 1)
        vec = tuple(
            sum((c * a[k] for c, a in zip(coeffs, f.generators)), Fraction(0)) for k in range(f.dimension)
        )
        lam.append((f.name, mass))
        t.append((f.name, vec))
        hull.append((f.name, coeffs))
    return StrassenDecomposition(DiscreteMeasure(tuple(lam)), tuple(t), tuple(hull))


def verify_decomposition(phi: Sequence, F: Sequence[PolyhedralSublinear], dec: StrassenDecomposition) -> bool:
    """Exact re-substitution: ``λ`` a probability, ``t_f`` in its hull, ``Σ λ t = φ``."""
    phi = to_vector(phi)
    byname = {f.name: f for f in F}
    if not dec.lam.is_probability or not set(dec.lam.support) <= set(byname):
        return False
    t = dict(dec.t)
    hull = dict(dec.hull_weights)
    if set(t) != set(byname) or set(hull) != set(byname):
        return False
    for name, f in byname.items():
        c = hull[name]
        if len(c) != len(f.generators) or any(v < 0 for v in c) or sum(c, Fraction(0)) != 1:
            return False
        comb = tuple(sum((ci * a[k] for ci, a in zip(c, f.generators)), Fraction(0)) for k in range(f.dimension))
        if comb != tuple(t[name]):
            return False
        if any(dot(t[name], a) > f(a) for a in f.generators):
            return False
    total = [Fraction(0)] * len(phi)
    for name, w in dec.lam.weights:
        for k, v in enumerate(t[name]):
            total[k] += w * v
    return tuple(total) == phi
