"""The set function ``I_F`` and exhaustions of a finite point set.

All operations run on the clipped family ``|f| ∧ 1``; clipping is idempotent
so passing an already clipped matrix is harmless.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .core import DiscreteMeasure, FamilyMatrix, ParseError, integral
from .minimax import game_value


def intersection_bound(A: FamilyMatrix, U: Sequence[str]) -> tuple[Fraction, DiscreteMeasure, DiscreteMeasure]:
    """``I_F(U) = min_{δ ∈ Δ(U)} max_f ⟨f, δ⟩`` with both optimisers.

    The dual ``max_{m ∈ Δ(F)} min_{x ∈ U} Σ_f m(f) f(x)`` is solved as a
    separate LP and must agree exactly.  Returns ``(value, δ, m)``.
    """
    U = list(dict.fromkeys(U))
    if not U:
        raise ValueError("intersection_bound needs a non-empty subset")
    game = game_value(A.clipped().restrict_cols(U).transpose())
    return game.value, game.measure, game.point_weights


@dataclass(frozen=True)
class ExhaustionInstance:
    family: FamilyMatrix
    pieces: tuple[tuple[str, tuple[str, ...]], ...]
    remainder: tuple[str, ...] = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", self.family.clipped())
        pieces = tuple((str(name), tuple(pts)) for name, pts in self.pieces)
        names = [name for name, _ in pieces]
        if len(set(names)) != len(names):
            raise ValueError("piece names must be unique")
        cols = self.family.col_index
        for name, pts in pieces:
            unknown = [x for x in pts if x not in cols]
            if unknown:
                raise ValueError(f"piece {name!r} contains unknown points {unknown}")
        object.__setattr__(self, "pieces", pieces)
        covered = {x for _, pts in pieces for x in pts}
        object.__setattr__(self, "remainder", tuple(x for x in self.family.cols if x not in covered))

    def to_json(self) -> dict:
        out = self.family.to_json()
        out["pieces"] = [{"name": name, "points": list(pts)} for name, pts in self.pieces]
        return out

    @classmethod
    def from_json(cls, data, pieces=None) -> "ExhaustionInstance":
        A = FamilyMatrix.from_json(data)
        if pieces is None:
            raw = data.get("pieces")
            if raw is None:
                raise ParseError("instance has no 'pieces'", "pieces")
            if not isinstance(raw, list):
                raise ParseError("expected a list of pieces", "pieces")
            pieces = []
            for i, item in enumerate(raw):
                if not isinstance(item, Mapping) or not isinstance(item.get("points"), list):
                    raise ParseError("expected {'name': ..., 'points': [...]}", f"pieces[{i}]")
                pieces.append((item.get("name", f"X{i + 1}"), item["points"]))
        try:
            return cls(A, tuple(pieces))
        except ValueError as exc:
            raise ParseError(str(exc), "pieces") from None


@dataclass(frozen=True)
class ExhaustionReport:
    """Per-condition outcome; ``bounds`` lists ``I_F`` of every piece."""

    cardinality: bool
    bounds: tuple[tuple[str, Fraction], ...]
    positive: bool
    remainder: tuple[str, ...]
    remainder_max: Fraction
    null_remainder: bool

    @property
    def ok(self) -> bool:
        return self.cardinality and self.positive and self.null_remainder

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "conditions": {
                "cardinality": self.cardinality,
                "positive_pieces": self.positive,
                "null_remainder": self.null_remainder,
            },
            "bounds": [{"piece": name, "value": v} for name, v in self.bounds],
            "remainder": list(self.remainder),
            "remainder_max": self.remainder_max,
        }


def verify_exhaustion(inst: ExhaustionInstance) -> ExhaustionReport:
    """Check ``I_F(X_α) > 0`` for each piece and ``f = 0`` on the remainder.

    The cardinality condition is vacuous for finitely many pieces.  An
    empty piece has no mixture to charge and fails positivity.
    """
    A = inst.family
    bounds = tuple(
        (name, intersection_bound(A, pts)[0] if pts else Fraction(0)) for name, pts in inst.pieces
    )
    idx = [A.col_index[x] for x in inst.remainder]
    rmax = max((row[j] for row in A.values for j in idx), default=Fraction(0))
    return ExhaustionReport(
        cardinality=True,
        bounds=bounds,
        positive=all(v > 0 for _, v in bounds),
        remainder=inst.remainder,
        remainder_max=rmax,
        null_remainder=rmax == 0,
    )


def build_exhaustion(A: FamilyMatrix, G: Sequence[DiscreteMeasure], p: Sequence[int]) -> ExhaustionInstance:
    """Pieces ``X_α = {x : g_α(x) > 1/p_α}`` with ``g_α = ∫ f dG_α`` on ``|f| ∧ 1``.

    ``G_α`` itself witnesses ``I_F(X_α) > 1/p_α``.  Empty pieces are
    dropped; the remainder collects the uncovered points.
    """
    if len(G) != len(p):
        raise ValueError(f"{len(G)} measures but {len(p)} thresholds")
    A = A.clipped()
    pieces = []
    for k, (m, pk) in enumerate(zip(G, p), start=1):
        if isinstance(pk, bool) or int(pk) != pk or pk <= 0:
            raise ValueError(f"threshold p[{k - 1}] must be a positive integer, got {pk!r}")
        cut = Fraction(1, int(pk))
        g = integral(m, A)
        pts = tuple(x for x, v in zip(A.cols, g) if v > cut)
        if pts:
            pieces.append((f"X{k}", pts))
    return ExhaustionInstance(A, tuple(pieces))


def default_exhaustion(A: FamilyMatrix) -> tuple[list[DiscreteMeasure], list[int], ExhaustionInstance]:
    """One point mass per row, each with the coarsest threshold below its least positive value."""
    A = A.clipped()
    G, p = [], []
    for f, row in zip(A.rows, A.values):
        pos = [v for v in row if v > 0]
        if pos:
            G.append(DiscreteMeasure.point_mass(f))
            p.append(int(1 / min(pos)) + 1)
    return G, p, build_exhaustion(A, G, p)


def combine_countable(G: Sequence[DiscreteMeasure], weights: Sequence | None = None) -> DiscreteMeasure:
    """``Σ_k w_k G_k``, by default with ``w_k ∝ 2^{-k}``.

    Every ``w_k`` is positive, so ``{g > 0}`` is the union of the
    ``{g_k > 0}`` for a nonnegative family.
    """
    if not G:
        raise ValueError("combine_countable needs at least one measure")
    if weights is None:
        raw = [Fraction(1, 2**k) for k in range(1, len(G) + 1)]
        weights = [w / sum(raw) for w in raw]
    else:
        weights = [Fraction(w) for w in weights]
        if len(weights) != len(G):
            raise ValueError(f"{len(G)} measures but {len(weights)} weights")
        if any(w < 0 for w in weights) or sum(weights) != 1:
            raise ValueError("weights must be a probability vector")
    total: dict[str, Fraction] = {}
    for w, m in zip(weights, G):
        for f, v in m.weights:
            total[f] = total.get(f, Fraction(0)) + w * v
    return DiscreteMeasure(tuple(total.items()))
