"""Exact rational simplex with primal, dual and infeasibility certificates.

The solver is a dense two-phase tableau method driven by Bland's
least-index rule, so it terminates on degenerate problems and is fully
deterministic.  All arithmetic is on :class:`fractions.Fraction`.

Sign conventions
----------------
For ``max c·x`` the dual vector ``y`` satisfies ``y_i >= 0`` on ``<=``
rows and ``y_i <= 0`` on ``>=`` rows; for ``min`` the signs flip.  With
``r = c - Aᵀy`` the bound multipliers are read off ``r``: a positive
``r_j`` in a maximisation must be paid for by a finite upper bound, a
negative one by a finite lower bound.

An infeasibility ray is expressed against every row rewritten as ``>=``
(``<=`` rows negated).  Entries on inequality rows are nonnegative and the
combined row ``a·x >= β`` has ``sup_box a·x < β``; with the default bounds
``x >= 0`` this is the textbook ``yᵀA <= 0 < yᵀb``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

LE, EQ, GE = "<=", "=", ">="
_RELATIONS = (LE, EQ, GE)

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class StandardLp:
    """``sense c·x`` subject to ``A x (relations) b`` and ``lower <= x <= upper``.

    ``lower[j] is None`` means unbounded below; ``upper[j] is None`` means
    unbounded above.  Lower bounds default to zero.
    """

    objective: tuple[Fraction, ...]
    matrix: tuple[tuple[Fraction, ...], ...]
    relations: tuple[str, ...]
    rhs: tuple[Fraction, ...]
    lower: tuple[Fraction | None, ...] | None = None
    upper: tuple[Fraction | None, ...] | None = None
    sense: str = "max"

    def __post_init__(self) -> None:
        n = len(self.objective)
        object.__setattr__(self, "objective", tuple(Fraction(c) for c in self.objective))
        object.__setattr__(
            self, "matrix", tuple(tuple(Fraction(a) for a in row) for row in self.matrix)
        )
        object.__setattr__(self, "relations", tuple(self.relations))
        object.__setattr__(self, "rhs", tuple(Fraction(b) for b in self.rhs))
        lower = (ZERO,) * n if self.lower is None else tuple(
            None if v is None else Fraction(v) for v in self.lower
        )
        upper = (None,) * n if self.upper is None else tuple(
            None if v is None else Fraction(v) for v in self.upper
        )
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if self.sense not in ("max", "min"):
            raise ValueError(f"sense must be 'max' or 'min', got {self.sense!r}")
        m = len(self.matrix)
        if len(self.relations) != m or len(self.rhs) != m:
            raise ValueError(
                f"dimension mismatch: {m} rows, {len(self.relations)} relations, "
                f"{len(self.rhs)} right-hand sides"
            )
        for i, row in enumerate(self.matrix):
            if len(row) != n:
                raise ValueError(f"dimension mismatch: row {i} has {len(row)} entries, expected {n}")
        for rel in self.relations:
            if rel not in _RELATIONS:
                raise ValueError(f"unknown relation {rel!r}")
        if len(lower) != n or len(upper) != n:
            raise ValueError("dimension mismatch in variable bounds")

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    @property
    def num_rows(self) -> int:
        return len(self.matrix)


@dataclass(frozen=True)
class Optimal:
    primal: tuple[Fraction, ...]
    dual: tuple[Fraction, ...]
    value: Fraction
    status: str = field(default="optimal", init=False)


@dataclass(frozen=True)
class Infeasible:
    ray: tuple[Fraction, ...]
    status: str = field(default="infeasible", init=False)


@dataclass(frozen=True)
class Unbounded:
    point: tuple[Fraction, ...]
    direction: tuple[Fraction, ...]
    status: str = field(default="unbounded", init=False)


LpOutcome = Optimal | Infeasible | Unbounded


class _Tableau:
    """Dense tableau ``T x = rhs`` with an explicit basis; minimisation only."""

    def __init__(
        self, rows: list[list[Fraction]], rhs: list[Fraction], basis: list[int], ncols: int
    ) -> None:
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.ncols = ncols

    def pivot(self, r: int, c: int) -> None:
        prow = self.rows[r]
        p = prow[c]
        if p != 1:
            inv = 1 / p
            prow[:] = [v * inv for v in prow]
            self.rhs[r] *= inv
        nz = [j for j, v in enumerate(prow) if v]
        for i, row in enumerate(self.rows):
            if i == r:
                continue
            f = row[c]
            if f:
                for j in nz:
                    row[j] -= f * prow[j]
                self.rhs[i] -= f * self.rhs[r]
        self.basis[r] = c

    def reduced_costs(self, cost: Sequence[Fraction]) -> list[Fraction]:
        d = list(cost)
        for i, b in enumerate(self.basis):
            cb = cost[b]
            if cb:
                for j, v in enumerate(self.rows[i]):
                    if v:
                        d[j] -= cb * v
        return d

    def value(self, cost: Sequence[Fraction]) -> Fraction:
        return sum((cost[b] * self.rhs[i] for i, b in enumerate(self.basis)), ZERO)

    def duals(self, cost: Sequence[Fraction], identity_cols: Sequence[int]) -> list[Fraction]:
        """``c_Bᵀ B⁻¹``; column ``identity_cols[i]`` started as unit vector ``e_i``."""
        return [
            sum((cost[b] * self.rows[k][col] for k, b in enumerate(self.basis)), ZERO)
            for col in identity_cols
        ]

    def run(self, cost: Sequence[Fraction], allowed: Sequence[bool]) -> int | None:
        """Bland's rule until optimal (returns None) or unbounded (returns entering column)."""
        while True:
            d = self.reduced_costs(cost)
            entering = next((j for j in range(self.ncols) if allowed[j] and d[j] < 0), None)
            if entering is None:
                return None
            best: tuple[Fraction, int, int] | None = None
            for i, row in enumerate(self.rows):
                a = row[entering]
                if a > 0:
                    key = (self.rhs[i] / a, self.basis[i], i)
                    if best is None or key < best:
                        best = key
            if best is None:
                return entering
            self.pivot(best[2], entering)


def solve(lp: StandardLp) -> LpOutcome:
    """Solve ``lp`` exactly.  Deterministic for a given instance."""
    n = lp.num_vars

    # Substitute x_j = offset_j + Σ_k T[j][k] x'_k with x' >= 0.
    offset: list[Fraction] = []
    columns: list[list[tuple[int, Fraction]]] = []  # internal col -> [(orig var, coeff)]
    var_cols: list[list[tuple[int, Fraction]]] = [[] for _ in range(n)]
    extra_rows: list[tuple[dict[int, Fraction], Fraction]] = []
    for j in range(n):
        lo, hi = lp.lower[j], lp.upper[j]
        if lo is not None:
            offset.append(lo)
            k = len(columns)
            columns.append([(j, ONE)])
            var_cols[j].append((k, ONE))
            if hi is not None:
                extra_rows.append(({k: ONE}, hi - lo))
        elif hi is not None:
            offset.append(hi)
            k = len(columns)
            columns.append([(j, -ONE)])
            var_cols[j].append((k, -ONE))
        else:
            offset.append(ZERO)
            for sign in (ONE, -ONE):
                k = len(columns)
                columns.append([(j, sign)])
                var_cols[j].append((k, sign))
    nstruct = len(columns)

    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    rels: list[str] = []
    sigma: list[int] = []
    for a, rel, b in zip(lp.matrix, lp.relations, lp.rhs):
        row = [ZERO] * nstruct
        shift = b
        for j, aj in enumerate(a):
            if aj:
                shift -= aj * offset[j]
                for k, t in var_cols[j]:
                    row[k] += aj * t
        rows.append(row)
        rhs.append(shift)
        rels.append(rel)
    for coeffs, bound in extra_rows:
        row = [ZERO] * nstruct
        for k, v in coeffs.items():
            row[k] = v
        rows.append(row)
        rhs.append(bound)
        rels.append(LE)
    m = len(rows)
    flip = {LE: GE, GE: LE, EQ: EQ}
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -rhs[i]
            rels[i] = flip[rels[i]]
            sigma.append(-1)
        else:
            sigma.append(1)

    # Slack/surplus columns, then artificials.
    slack_of: dict[int, int] = {}
    col = nstruct
    for i in range(m):
        if rels[i] != EQ:
            slack_of[i] = col
            col += 1
    art_of: dict[int, int] = {}
    for i in range(m):
        if rels[i] != LE:
            art_of[i] = col
            col += 1
    ncols = col
    table = []
    basis = []
    identity_cols = []
    for i in range(m):
        full = rows[i] + [ZERO] * (ncols - nstruct)
        if i in slack_of:
            full[slack_of[i]] = ONE if rels[i] == LE else -ONE
        if i in art_of:
            full[art_of[i]] = ONE
            basis.append(art_of[i])
            identity_cols.append(art_of[i])
        else:
            basis.append(slack_of[i])
            identity_cols.append(slack_of[i])
        table.append(full)
    tab = _Tableau(table, rhs, basis, ncols)
    is_art = [False] * ncols
    for c in art_of.values():
        is_art[c] = True

    # Phase I.
    if art_of:
        cost1 = [ONE if is_art[j] else ZERO for j in range(ncols)]
        tab.run(cost1, [True] * ncols)
        if tab.value(cost1) > 0:
            y = tab.duals(cost1, identity_cols)
            ray = []
            for i in range(lp.num_rows):
                if rels[i] == GE:
                    ray.append(y[i])
                elif rels[i] == LE:
                    ray.append(-y[i])
                else:
                    ray.append(sigma[i] * y[i])
            return Infeasible(tuple(ray))
        for i in range(m):
            if is_art[tab.basis[i]]:
                row = tab.rows[i]
                j = next((j for j in range(ncols) if not is_art[j] and row[j] != 0), None)
                if j is not None:
                    tab.pivot(i, j)

    # Phase II, internally a minimisation.
    sgn = ONE if lp.sense == "min" else -ONE
    cost2 = [ZERO] * ncols
    for k, ((j, t),) in enumerate(columns):
        cost2[k] = sgn * lp.objective[j] * t
    allowed = [not is_art[j] for j in range(ncols)]
    entering = tab.run(cost2, allowed)

    xint = [ZERO] * ncols
    for i, b in enumerate(tab.basis):
        xint[b] = tab.rhs[i]
    primal = _to_original(offset, columns, xint, n)

    if entering is not None:
        dint = [ZERO] * ncols
        dint[entering] = ONE
        for i, b in enumerate(tab.basis):
            dint[b] = -tab.rows[i][entering]
        direction = _to_original([ZERO] * n, columns, dint, n)
        return Unbounded(primal, direction)

    y = tab.duals(cost2, identity_cols)
    dual = tuple(
        (sigma[i] * y[i]) if lp.sense == "min" else (-sigma[i] * y[i]) for i in range(lp.num_rows)
    )
    value = sum((c * x for c, x in zip(lp.objective, primal)), ZERO)
    return Optimal(primal, dual, value)


def _to_original(offset, columns, xint, n) -> tuple[Fraction, ...]:
    x = list(offset)
    for k, ((j, t),) in enumerate(columns):
        if xint[k]:
            x[j] += t * xint[k]
    return tuple(x[:n])


# -- exact certificate checks -------------------------------------------------


def _row_values(lp: StandardLp, x: Sequence[Fraction]) -> list[Fraction]:
    return [sum((a * v for a, v in zip(row, x)), ZERO) for row in lp.matrix]


def primal_violations(lp: StandardLp, x: Sequence[Fraction]) -> list[str]:
    out = []
    if len(x) != lp.num_vars:
        return [f"primal has {len(x)} entries, expected {lp.num_vars}"]
    for j, (v, lo, hi) in enumerate(zip(x, lp.lower, lp.upper)):
        if lo is not None and v < lo:
            out.append(f"x[{j}] = {v} below lower bound {lo}")
        if hi is not None and v > hi:
            out.append(f"x[{j}] = {v} above upper bound {hi}")
    for i, (ax, rel, b) in enumerate(zip(_row_values(lp, x), lp.relations, lp.rhs)):
        if (rel == LE and ax > b) or (rel == GE and ax < b) or (rel == EQ and ax != b):
            out.append(f"row {i}: {ax} {rel} {b} fails")
    return out


def _reduced(lp: StandardLp, y: Sequence[Fraction]) -> list[Fraction]:
    r = list(lp.objective)
    for yi, row in zip(y, lp.matrix):
        if yi:
            for j, a in enumerate(row):
                r[j] -= yi * a
    return r


def dual_objective(lp: StandardLp, y: Sequence[Fraction]) -> Fraction | None:
    """Dual objective of ``y``; ``None`` if ``y`` is not dual feasible."""
    maximize = lp.sense == "max"
    for yi, rel in zip(y, lp.relations):
        if rel == LE and (yi < 0 if maximize else yi > 0):
            return None
        if rel == GE and (yi > 0 if maximize else yi < 0):
            return None
    total = sum((yi * b for yi, b in zip(y, lp.rhs)), ZERO)
    for rj, lo, hi in zip(_reduced(lp, y), lp.lower, lp.upper):
        if rj == 0:
            continue
        # max: r > 0 needs an upper bound, r < 0 a lower bound; min: reversed.
        if (rj > 0) == maximize:
            if hi is None:
                return None
            total += rj * hi
        else:
            if lo is None:
                return None
            total += rj * lo
    return total


def optimal_violations(lp: StandardLp, out: Optimal) -> list[str]:
    problems = primal_violations(lp, out.primal)
    value = sum((c * x for c, x in zip(lp.objective, out.primal)), ZERO)
    if value != out.value:
        problems.append(f"reported value {out.value} differs from c·x = {value}")
    if len(out.dual) != lp.num_rows:
        return problems + ["dual has wrong length"]
    dval = dual_objective(lp, out.dual)
    if dval is None:
        problems.append("dual vector is not dual feasible")
    elif dval != value:
        problems.append(f"duality gap: primal {value}, dual {dval}")
    for i, (ax, yi, b) in enumerate(zip(_row_values(lp, out.primal), out.dual, lp.rhs)):
        if yi and ax != b:
            problems.append(f"complementary slackness fails on row {i}")
    return problems


def combined_row(lp: StandardLp, ray: Sequence[Fraction]) -> tuple[list[Fraction], Fraction]:
    """``(a, β)`` with ``a·x >= β`` the ray's nonnegative combination of rows."""
    a = [ZERO] * lp.num_vars
    beta = ZERO
    for yi, row, rel, b in zip(ray, lp.matrix, lp.relations, lp.rhs):
        s = -yi if rel == LE else yi
        if s:
            for j, v in enumerate(row):
                a[j] += s * v
            beta += s * b
    return a, beta


def box_supremum(a: Sequence[Fraction], lower, upper) -> Fraction | None:
    """``sup a·x`` over the variable bounds, ``None`` when it is infinite."""
    total = ZERO
    for aj, lo, hi in zip(a, lower, upper):
        if aj > 0:
            if hi is None:
                return None
            total += aj * hi
        elif aj < 0:
            if lo is None:
                return None
            total += aj * lo
    return total


def farkas_violations(lp: StandardLp, ray: Sequence[Fraction]) -> list[str]:
    if len(ray) != lp.num_rows:
        return ["ray has wrong length"]
    problems = []
    for i, (yi, rel) in enumerate(zip(ray, lp.relations)):
        if rel != EQ and yi < 0:
            problems.append(f"ray entry {i} is negative on an inequality row")
    a, beta = combined_row(lp, ray)
    sup = box_supremum(a, lp.lower, lp.upper)
    if sup is None:
        problems.append("combined row is unbounded over the variable box")
    elif not sup < beta:
        problems.append(f"no contradiction: sup {sup} >= {beta}")
    return problems


def unbounded_violations(lp: StandardLp, out: Unbounded) -> list[str]:
    problems = primal_violations(lp, out.point)
    d = out.direction
    for i, (ad, rel) in enumerate(zip(_row_values(lp, d), lp.relations)):
        if (rel == LE and ad > 0) or (rel == GE and ad < 0) or (rel == EQ and ad != 0):
            problems.append(f"direction leaves row {i}")
    for j, (dj, lo, hi) in enumerate(zip(d, lp.lower, lp.upper)):
        if (lo is not None and dj < 0) or (hi is not None and dj > 0):
            problems.append(f"direction leaves bound of x[{j}]")
    gain = sum((c * v for c, v in zip(lp.objective, d)), ZERO)
    if (gain <= 0) if lp.sense == "max" else (gain >= 0):
        problems.append("direction does not improve the objective")
    return problems


def outcome_violations(lp: StandardLp, out: LpOutcome) -> list[str]:
    if isinstance(out, Optimal):
        return optimal_violations(lp, out)
    if isinstance(out, Infeasible):
        return farkas_violations(lp, out.ray)
    return unbounded_violations(lp, out)


def verify_outcome(lp: StandardLp, out: LpOutcome) -> bool:
    """True iff ``out`` certifies itself on ``lp`` with zero residual."""
    return not outcome_violations(lp, out)


class LpError(RuntimeError):
    """An LP that the calling theorem guarantees solvable came back otherwise."""


def expect_optimal(lp: StandardLp) -> Optimal:
    out = solve(lp)
    if not isinstance(out, Optimal):
        raise LpError(f"expected an optimal solution, solver reported {out.status}")
    return out
