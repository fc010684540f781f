"""Summing constants ``C_g``, the ``ℓ_F`` norm and net-relaxed Pietsch estimates."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import DiscreteMeasure, FamilyMatrix, to_vector
from .lp import GE, LpError, Optimal, StandardLp, solve


@dataclass(frozen=True)
class SummingWitness:
    """``|g| <= C Σ_f m(f)|f|`` pointwise, with ``C`` minimal.

    ``dual`` holds weights ``ν >= 0`` on the points with
    ``Σ_x ν(x)|f(x)| <= 1`` for every ``f`` and ``Σ_x ν(x)|g(x)| = C``,
    which proves minimality.  When ``finite`` is false, ``witness`` is a
    point where ``g`` is nonzero but every ``f`` vanishes.
    """

    C: Fraction | None
    m: DiscreteMeasure | None
    finite: bool
    dual: tuple[Fraction, ...] = ()
    witness: str | None = None

    def to_json(self) -> dict:
        if not self.finite:
            return {"finite": False, "witness": self.witness}
        return {"finite": True, "C": self.C, "m": self.m, "dual": list(self.dual)}


def summing_constant(A: FamilyMatrix, g) -> SummingWitness:
    """``min Σ μ`` over ``μ >= 0`` with ``Σ_f μ(f)|f(x)| >= |g(x)|`` at every ``x``.

    Writing ``μ = C m`` turns the search over pairs ``(C, m)`` into one LP.
    """
    g = A.vector(g)
    absA = A.absolute()
    cols = list(zip(*absA.values))
    for x, gx, col in zip(A.cols, g, cols):
        if gx != 0 and not any(col):
            return SummingWitness(None, None, False, witness=x)
    lp = StandardLp(
        objective=(Fraction(1),) * len(A.rows),
        matrix=[list(col) for col in cols],
        relations=(GE,) * len(A.cols),
        rhs=tuple(abs(v) for v in g),
        sense="min",
    )
    out = solve(lp)
    if not isinstance(out, Optimal):
        raise LpError(f"summing LP reported {out.status}")
    C = out.value
    # ``min`` duals on ``>=`` rows are nonnegative
    dual = tuple(out.dual)
    if C == 0:
        return SummingWitness(C, DiscreteMeasure.point_mass(A.rows[0]), True, dual)
    return SummingWitness(C, DiscreteMeasure.from_vector(A.rows, [mu / C for mu in out.primal]), True, dual)


def verify_summing(A: FamilyMatrix, g, w: SummingWitness) -> bool:
    """Exact re-substitution of a witness, including its minimality proof."""
    g = A.vector(g)
    absA = A.absolute()
    if not w.finite:
        if w.witness not in A.col_index:
            return False
        j = A.col_index[w.witness]
        return g[j] != 0 and all(row[j] == 0 for row in absA.values)
    if w.C is None or w.C < 0 or w.m is None or not w.m.is_probability:
        return False
    mix = [sum((w.m[f] * row[j] for f, row in zip(A.rows, absA.values)), Fraction(0)) for j in range(len(A.cols))]
    if any(abs(gx) > w.C * v for gx, v in zip(g, mix)):
        return False
    nu = w.dual
    if len(nu) != len(A.cols) or any(v < 0 for v in nu):
        return False
    if any(sum((n * v for n, v in zip(nu, row)), Fraction(0)) > 1 for row in absA.values):
        return False
    return sum((n * abs(gx) for n, gx in zip(nu, g)), Fraction(0)) == w.C


def ell_norm(A: FamilyMatrix, h) -> Fraction:
    """``max_f Σ_x |f(x) h(x)|``."""
    h = A.vector(h)
    return max(sum((abs(v * hx) for v, hx in zip(row, h)), Fraction(0)) for row in A.values)


NORMS = ("linf", "l1", "l2")


def vector_norm_power(v: Sequence[Fraction], p, kind: str) -> Fraction:
    """``‖v‖^p`` exactly; ``l2`` needs an even ``p``."""
    if kind == "linf":
        return max((abs(c) for c in v), default=Fraction(0)) ** p
    if kind == "l1":
        return sum((abs(c) for c in v), Fraction(0)) ** p
    if kind == "l2":
        if p % 2:
            raise ValueError("the l2 norm is exact only for even p")
        return sum((c * c for c in v), Fraction(0)) ** (p // 2)
    raise ValueError(f"unknown norm {kind!r}")


def pietsch_instance(T, p: int, net, sample, norm: str = "linf") -> tuple[FamilyMatrix, tuple[Fraction, ...]]:
    """``F = {x ↦ |⟨x*, x⟩|^p}`` over the net and ``g = ‖Tx‖^p`` on the sample."""
    T = [to_vector(r) for r in T]
    net = [to_vector(v) for v in net]
    sample = [to_vector(v) for v in sample]
    if not net or not sample:
        raise ValueError("net and sample must be non-empty")
    d = len(sample[0])
    if any(len(v) != d for v in net + sample) or any(len(r) != d for r in T):
        raise ValueError("dimension mismatch between operator, net and sample")
    values = [[abs(sum((a * b for a, b in zip(xs, x)), Fraction(0))) ** p for x in sample] for xs in net]
    A = FamilyMatrix.from_lists(
        values,
        rows=[f"n{i + 1}" for i in range(len(net))],
        cols=[f"s{j + 1}" for j in range(len(sample))],
    )
    g = tuple(vector_norm_power([sum((a * b for a, b in zip(r, x)), Fraction(0)) for r in T], p, norm) for x in sample)
    return A, g


def pietsch_estimate(T, p, net, sample, norm: str = "linf", exact: bool = True):
    """Lower bound for the net-relaxed Pietsch constant with its witness.

    Exact mode needs an integer ``p``; otherwise the floating-point path of
    the oracle is used and a float result is returned.
    """
    p = Fraction(p)
    if p < 1:
        raise ValueError("p must be at least 1")
    if p.denominator != 1:
        if exact:
            raise ValueError(f"p = {p} is not an integer; exact mode needs integer p")
        from .oracle import float_pietsch

        return float_pietsch(T, float(p), net, sample, norm)
    A, g = pietsch_instance(T, int(p), net, sample, norm)
    return summing_constant(A, g)
