"""Issue and re-check certificates for every command.

An instance is the parsed JSON of the instance file; ``params`` carries the
remaining arguments (target vector, subset, ρ ...) in serialised form so a
certificate plus its instance file is self-contained.  Checking re-derives
every stored number from the instance and never calls an LP: optimality
claims are backed by a matching dual solution stored next to the primal one.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Mapping

from .core import (
    Certificate,
    FamilyMatrix,
    ParseError,
    content_hash,
    jsonable,
    to_rational,
    to_vector,
)
from .domination import (
    BalanceViolation,
    DominationInstance,
    InHull,
    LinearFunctional,
    find_dominating_measure,
    fan_norm_domination,
    hull_membership,
    norm,
    dual_norm_kind,
)
from .exhaustion import default_exhaustion, intersection_bound, ExhaustionInstance, verify_exhaustion
from .minimax import first_uncovered, is_concave_like, local_minimax, minimax_report
from .representation import (
    SufficiencyInstance,
    StrassenViolation,
    Sufficient,
    check_sufficiency,
    functionals_from_json,
    representing_measure,
    strassen_decompose,
)
from .summability import pietsch_instance, summing_constant

COMMANDS = ("minimax", "dominate", "hull", "fan", "suffice", "strassen", "exhaust", "summing", "pietsch")

# kinds whose existence means the decision went the negative way
NEGATIVE_KINDS = {
    "balance_violation",
    "not_in_hull",
    "fan_violation",
    "sufficiency_violation",
    "strassen_violation",
    "summing_infinite",
}


class VerificationError(Exception):
    pass


def instance_hash(data: Any) -> str:
    return content_hash(data)


# -- instance loading ----------------------------------------------------------


def _matrix(data, params) -> FamilyMatrix:
    A = FamilyMatrix.from_json(data)
    return A.transpose() if params.get("transpose") else A


def _target(A: FamilyMatrix, raw, what: str = "target") -> tuple[Fraction, ...]:
    if raw is None:
        raise ParseError(f"missing {what}", what)
    if isinstance(raw, str) and raw in A.row_index:
        return A.row(raw)
    if isinstance(raw, str):
        raw = [v for v in raw.split(",") if v.strip()]
    return A.vector(raw, what)


def _vectors(data, key: str) -> list[tuple[Fraction, ...]]:
    if isinstance(data, Mapping):
        data = data.get(key, data.get("vectors"))
    if not isinstance(data, list) or not data:
        raise ParseError(f"expected a non-empty list of vectors under {key!r}", key)
    out = []
    for i, v in enumerate(data):
        if not isinstance(v, list):
            raise ParseError("expected a list of scalars", f"{key}[{i}]")
        out.append(to_vector(v, f"{key}[{i}]"))
    return out


def _groups(raw) -> list[list[str]]:
    if isinstance(raw, str):
        return [[x.strip() for x in grp.split(",") if x.strip()] for grp in raw.split(";") if grp.strip()]
    return [list(grp) for grp in raw]


def _fan_instance(data, params):
    if not isinstance(data, Mapping):
        raise ParseError("expected {'points': [[...]], 'values': [...]}")
    points = _vectors(data, "points")
    if "values" not in data:
        raise ParseError("missing 'values'", "values")
    g = to_vector(data["values"], "values")
    if len(g) != len(points):
        raise ParseError(f"{len(points)} points but {len(g)} values", "values")
    if len({len(x) for x in points}) != 1:
        raise ParseError("points differ in dimension", "points")
    rho = to_rational(params.get("rho"), "rho")
    kind = params.get("norm", "l1")
    if kind not in ("l1", "linf"):
        raise ParseError(f"unsupported norm {kind!r}", "norm")
    return points, g, rho, kind


def _operator(data) -> list[tuple[Fraction, ...]]:
    if isinstance(data, Mapping):
        data = data.get("operator", data.get("matrix"))
    if not isinstance(data, list) or not data:
        raise ParseError("expected {'operator': [[...], ...]}", "operator")
    return [to_vector(r, f"operator[{i}]") for i, r in enumerate(data)]


# -- issuing ------------------------------------------------------------------


def certify(command: str, data: Any, params: Mapping | None = None) -> Certificate:
    """Run ``command`` on the parsed instance and wrap the result as a certificate."""
    params = dict(params or {})
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}")
    kind, payload, params, arithmetic = _ISSUERS[command](data, params)
    return Certificate(command, kind, payload, params, instance_hash(data), arithmetic)


def _issue_minimax(data, params):
    A = _matrix(data, params)
    check = bool(params.get("check_concave", True))
    payload = minimax_report(A, check_concave=check).to_json()
    out_params = {"transpose": bool(params.get("transpose")), "check_concave": check}
    if params.get("subfamilies"):
        subs = _groups(params["subfamilies"])
        loc = local_minimax(A, subs)
        payload["local"] = {"value": loc.value, "measure": loc.measure, "index": loc.index}
        out_params["subfamilies"] = subs
    return "minimax_report", payload, out_params, "exact"


def _issue_dominate(data, params):
    if params.get("transpose"):
        raise ParseError("--transpose does not apply to domination instances", "transpose")
    inst = DominationInstance.from_json(data)
    res = find_dominating_measure(inst)
    if isinstance(res, BalanceViolation):
        payload = {
            "pairs": [{"target": g, "delta": d, "multiplicity": n} for g, d, n in res.pairs],
            "lhs": res.lhs,
            "rhs": res.rhs,
        }
        return "balance_violation", payload, {}, "exact"
    return "dominating_measure", {"measure": res.measure}, {}, "exact"


def _issue_hull(data, params):
    A = _matrix(data, params)
    g = _target(A, params.get("target"))
    res = hull_membership(A, g)
    out_params = {"transpose": bool(params.get("transpose")), "target": list(g)}
    if isinstance(res, InHull):
        return "in_hull", {"measure": res.measure}, out_params, "exact"
    payload = {"weights": list(res.vector(A.cols)), "target_value": res.target_value, "family_max": res.family_max}
    return "not_in_hull", payload, out_params, "exact"


def _issue_fan(data, params):
    points, g, rho, kind = _fan_instance(data, params)
    res = fan_norm_domination(points, g, rho, kind)
    out_params = {"rho": rho, "norm": kind}
    if isinstance(res, LinearFunctional):
        return "fan_functional", {"phi": list(res.phi)}, out_params, "exact"
    return "fan_violation", {"weights": list(res.weights), "lhs": res.lhs, "rhs": res.rhs}, out_params, "exact"


def _issue_suffice(data, params):
    H = _matrix(data, params)
    raw = params.get("subset") or ""
    Z = [list(raw)] if isinstance(raw, list) else _groups(raw)
    if len(Z) != 1 or not Z[0]:
        raise ParseError("expected a non-empty comma-separated subset", "subset")
    try:
        inst = SufficiencyInstance(H, tuple(Z[0]))
    except ValueError as exc:
        raise ParseError(str(exc), "subset") from None
    out_params = {"transpose": bool(params.get("transpose")), "subset": list(inst.subset)}
    res = check_sufficiency(inst)
    if isinstance(res, Sufficient):
        reps = []
        for x in H.cols:
            if x not in inst.subset:
                reps.append({"point": x, "measure": representing_measure(inst, x)})
        return "sufficient", {"representations": reps}, out_params, "exact"
    payload = {"point": res.point, "delta": res.delta, "margin": res.margin}
    return "sufficiency_violation", payload, out_params, "exact"


def _phi(raw) -> tuple[Fraction, ...]:
    if raw is None:
        raise ParseError("missing phi", "phi")
    if isinstance(raw, str):
        raw = [v for v in raw.split(",") if v.strip()]
    return to_vector(raw, "phi")


def _issue_strassen(data, params):
    F = functionals_from_json(data)
    phi = _phi(params.get("phi"))
    if len(phi) != F[0].dimension:
        raise ParseError(f"phi has dimension {len(phi)}, functionals {F[0].dimension}", "phi")
    res = strassen_decompose(phi, F)
    out_params = {"phi": list(phi)}
    if isinstance(res, StrassenViolation):
        payload = {"x": list(res.x), "phi_value": res.phi_value, "sup_value": res.sup_value}
        return "strassen_violation", payload, out_params, "exact"
    payload = {
        "lambda": res.lam,
        "t": [{"name": n, "vector": list(v)} for n, v in res.t],
        "hull_weights": [{"name": n, "weights": list(c)} for n, c in res.hull_weights],
    }
    return "strassen_decomposition", payload, out_params, "exact"


def _exhaustion_pieces(data, params, A):
    if params.get("pieces"):
        raw = params["pieces"]
        if isinstance(raw, str):
            return [(f"X{i + 1}", tuple(g)) for i, g in enumerate(_groups(raw))]
        return [(p["name"], tuple(p["points"])) for p in raw]
    if isinstance(data, Mapping) and data.get("pieces") is not None:
        return list(ExhaustionInstance.from_json(data).pieces)
    return list(default_exhaustion(A)[2].pieces)


def _issue_exhaust(data, params):
    A = _matrix(data, params)
    try:
        inst = ExhaustionInstance(A, tuple(_exhaustion_pieces(data, params, A)))
    except ValueError as exc:
        raise ParseError(str(exc), "pieces") from None
    report = verify_exhaustion(inst)
    pieces = []
    for name, pts in inst.pieces:
        entry = {"name": name, "points": list(pts)}
        if pts:
            value, delta, m = intersection_bound(inst.family, pts)
            entry.update(value=value, delta=delta, measure=m)
        else:
            entry["value"] = Fraction(0)
        pieces.append(entry)
    payload = {
        "ok": report.ok,
        "conditions": report.to_json()["conditions"],
        "pieces": pieces,
        "remainder": list(report.remainder),
        "remainder_max": report.remainder_max,
    }
    out_params = {
        "transpose": bool(params.get("transpose")),
        "pieces": [{"name": n, "points": list(p)} for n, p in inst.pieces],
    }
    return "exhaustion_report", payload, out_params, "exact"


def _summing_payload(w):
    if not w.finite:
        return "summing_infinite", {"witness": w.witness}
    return "summing_witness", {"C": w.C, "m": w.m, "dual": list(w.dual)}


def _issue_summing(data, params):
    A = _matrix(data, params)
    g = _target(A, params.get("target"))
    kind, payload = _summing_payload(summing_constant(A, g))
    return kind, payload, {"transpose": bool(params.get("transpose")), "target": list(g)}, "exact"


def _pietsch_params(params):
    p = to_rational(params.get("p"), "p")
    if p < 1:
        raise ParseError("p must be at least 1", "p")
    kind = params.get("norm", "linf")
    if kind not in ("linf", "l1", "l2"):
        raise ParseError(f"unsupported norm {kind!r}", "norm")
    net = _vectors(params.get("net"), "net")
    sample = _vectors(params.get("sample"), "sample")
    return p, kind, net, sample


def _issue_pietsch(data, params):
    T = _operator(data)
    p, kind, net, sample = _pietsch_params(params)
    out_params = {"p": p, "norm": kind, "net": [list(v) for v in net], "sample": [list(v) for v in sample]}
    exact = p.denominator == 1 and (kind != "l2" or p.numerator % 2 == 0)
    if not exact:
        from .oracle import float_pietsch

        res = float_pietsch(T, float(p), net, sample, kind)
        if not res["finite"]:
            return "summing_infinite", {"witness": res["witness"]}, out_params, "float"
        return "summing_witness", res, out_params, "float"
    try:
        A, g = pietsch_instance(T, int(p), net, sample, kind)
    except ValueError as exc:
        raise ParseError(str(exc), "operator") from None
    kind_, payload = _summing_payload(summing_constant(A, g))
    return kind_, payload, out_params, "exact"


_ISSUERS = {
    "minimax": _issue_minimax,
    "dominate": _issue_dominate,
    "hull": _issue_hull,
    "fan": _issue_fan,
    "suffice": _issue_suffice,
    "strassen": _issue_strassen,
    "exhaust": _issue_exhaust,
    "summing": _issue_summing,
    "pietsch": _issue_pietsch,
}


# -- checking -----------------------------------------------------------------


class _Arith:
    """Exact comparisons, or float comparisons with a relative tolerance."""

    def __init__(self, tolerance: float | None) -> None:
        self.tol = tolerance

    def num(self, v, path: str = ""):
        if self.tol is None:
            if isinstance(v, float):
                raise VerificationError(f"{path}: float value in an exact certificate")
            try:
                return to_rational(v, path)
            except ParseError as exc:
                raise VerificationError(str(exc)) from None
        if isinstance(v, bool) or not isinstance(v, (int, float, str, Fraction)):
            raise VerificationError(f"{path}: not a scalar")
        try:
            return float(to_rational(v)) if isinstance(v, str) else float(v)
        except (ParseError, ValueError) as exc:
            raise VerificationError(str(exc)) from None

    def vec(self, vs, path: str = ""):
        if not isinstance(vs, list):
            raise VerificationError(f"{path}: expected a list")
        return [self.num(v, f"{path}[{i}]") for i, v in enumerate(vs)]

    def _slack(self, a, b):
        return self.tol * max(1.0, abs(float(a)), abs(float(b)))

    def eq(self, a, b) -> bool:
        return a == b if self.tol is None else abs(float(a) - float(b)) <= self._slack(a, b)

    def le(self, a, b) -> bool:
        return a <= b if self.tol is None else float(a) <= float(b) + self._slack(a, b)

    def lt(self, a, b) -> bool:
        return a < b if self.tol is None else float(a) < float(b) + self._slack(a, b)

    def measure(self, raw, labels, path: str) -> dict:
        """A probability over ``labels`` as a dict; zero weights are dropped."""
        if not isinstance(raw, Mapping):
            raise VerificationError(f"{path}: expected a label to weight mapping")
        out = {}
        for k, v in raw.items():
            if k not in labels:
                raise VerificationError(f"{path}: unknown label {k!r}")
            w = self.num(v, f"{path}.{k}")
            if not self.le(0, w):
                raise VerificationError(f"{path}: negative weight on {k!r}")
            out[k] = w
        if not self.eq(sum(out.values(), Fraction(0)), 1):
            raise VerificationError(f"{path}: weights do not sum to 1")
        return out


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise VerificationError(msg)


def _mix(A: FamilyMatrix, m: Mapping) -> list:
    """``Σ_f m(f) f(x)`` for every column."""
    return [sum((m.get(f, 0) * row[j] for f, row in zip(A.rows, A.values)), Fraction(0)) for j in range(len(A.cols))]


def _pair(A: FamilyMatrix, row, h: Mapping) -> Any:
    return sum((h.get(x, 0) * v for x, v in zip(A.cols, row)), Fraction(0))


def _field(payload, key):
    if not isinstance(payload, Mapping) or key not in payload:
        raise VerificationError(f"payload lacks {key!r}")
    return payload[key]


def _check_minimax(data, cert, ar: _Arith):
    A = _matrix(data, cert.params)
    P = cert.payload
    cols = list(zip(*A.values))
    lower = ar.num(_field(P, "lower"), "lower")
    upper = ar.num(_field(P, "upper"), "upper")
    hull = ar.num(_field(P, "hull_value"), "hull_value")
    _need(ar.eq(lower, max(min(c) for c in cols)), "lower value mismatch")
    _need(ar.eq(upper, min(max(r) for r in A.values)), "upper value mismatch")
    x0 = _field(P, "attaining_point")
    _need(x0 in A.col_index and ar.eq(min(A.column(x0)), lower), "attaining point does not reach the lower value")
    m = ar.measure(_field(P, "optimal_measure"), A.row_index, "optimal_measure")
    mix = _mix(A, m)
    _need(ar.eq(max(mix), hull), "optimal measure does not attain the hull value")
    h = ar.measure(_field(P, "point_weights"), A.col_index, "point_weights")
    _need(ar.eq(min(_pair(A, row, h) for row in A.values), hull), "point weights do not certify the hull value")
    sub = P.get("sub_barycentre")
    below = [f for f, row in zip(A.rows, A.values) if all(ar.le(v, w) for v, w in zip(row, mix))]
    if sub is None:
        _need(not below, "a sub-barycentre exists but none is reported")
    else:
        _need(sub in below, "reported sub-barycentre is not below the optimal mixture")
    if cert.params.get("check_concave", True):
        concave = _field(P, "concave_like")
        if concave is True:
            _need(is_concave_like(A)[0], "family is not concave-like")
        else:
            _need(concave is False, "concave_like must be a boolean")
            v = _field(P, "concavity_violation")
            _need(isinstance(v, Mapping), "malformed concavity violation")
            x, x2 = v.get("x"), v.get("x2")
            _need(x in A.col_index and x2 in A.col_index, "unknown points in concavity violation")
            lo, hi = ar.num(v.get("lo"), "lo"), ar.num(v.get("hi"), "hi")
            _need(ar.le(0, lo) and ar.lt(lo, hi) and ar.le(hi, 1), "bad concavity interval")
            t = (lo + hi) / 2
            comb_ = [t * a + (1 - t) * b for a, b in zip(A.column(x), A.column(x2))]
            for c in cols:
                _need(not all(ar.le(a, b) for a, b in zip(comb_, c)), "concavity violation is dominated")
            # the reported interval must be the leftmost gap itself, not a piece of it
            gap = first_uncovered(A, x, x2)
            _need(gap is not None and ar.eq(lo, gap[0]) and ar.eq(hi, gap[1]), "concavity interval is not the first gap")
    if "subfamilies" in cert.params:
        subs = cert.params["subfamilies"]
        loc = _field(P, "local")
        ref = local_minimax(A, subs)
        idx = to_rational(loc.get("index"), "local.index")
        _need(idx.denominator == 1 and 0 <= idx < len(subs), "bad local index")
        idx = int(idx)
        lm = ar.measure(loc.get("measure"), set(subs[idx]), "local.measure")
        value = ar.num(loc.get("value"), "local.value")
        _need(ar.eq(max(_mix(A, lm)), value), "local measure does not attain its value")
        _need(ar.eq(value, ref.value), "local value is not minimal")


def _check_dominate(data, cert, ar):
    inst = DominationInstance.from_json(data)
    A, G = inst.family, inst.targets
    P = cert.payload
    if cert.kind == "dominating_measure":
        mix = _mix(A, ar.measure(_field(P, "measure"), A.row_index, "measure"))
        _need(all(ar.le(v, w) for row in G.values for v, w in zip(row, mix)), "measure does not dominate")
        return
    _need(cert.kind == "balance_violation", f"unknown kind {cert.kind!r}")
    pairs = _field(P, "pairs")
    _need(isinstance(pairs, list) and pairs, "violation needs at least one pair")
    total = [0] * len(A.cols)
    lhs = 0
    for i, pr in enumerate(pairs):
        _need(isinstance(pr, Mapping) and pr.get("target") in G.row_index, f"pairs[{i}]: unknown target")
        n = to_rational(pr.get("multiplicity"), f"pairs[{i}].multiplicity")
        _need(n.denominator == 1 and n >= 1, f"pairs[{i}]: multiplicity must be a positive integer")
        d = ar.measure(pr.get("delta"), A.col_index, f"pairs[{i}].delta")
        lhs += n * _pair(A, G.row(pr["target"]), d)
        for j, x in enumerate(A.cols):
            total[j] += n * d.get(x, 0)
    rhs = max(sum((t * v for t, v in zip(total, row)), Fraction(0)) for row in A.values)
    _need(ar.eq(lhs, ar.num(_field(P, "lhs"), "lhs")), "lhs mismatch")
    _need(ar.eq(rhs, ar.num(_field(P, "rhs"), "rhs")), "rhs mismatch")
    _need(ar.lt(rhs, lhs), "balance inequality is not violated")


def _check_hull(data, cert, ar):
    A = _matrix(data, cert.params)
    g = _target(A, cert.params.get("target"))
    P = cert.payload
    if cert.kind == "in_hull":
        mix = _mix(A, ar.measure(_field(P, "measure"), A.row_index, "measure"))
        _need(all(ar.eq(a, b) for a, b in zip(mix, g)), "mixture differs from the target")
        return
    _need(cert.kind == "not_in_hull", f"unknown kind {cert.kind!r}")
    w = ar.vec(_field(P, "weights"), "weights")
    _need(len(w) == len(A.cols), "weights have the wrong length")
    _need(ar.eq(sum(abs(v) for v in w), 1), "weights are not normalised")
    tv = sum(a * b for a, b in zip(g, w))
    fm = max(sum(a * b for a, b in zip(row, w)) for row in A.values)
    _need(ar.eq(tv, ar.num(_field(P, "target_value"))), "target value mismatch")
    _need(ar.eq(fm, ar.num(_field(P, "family_max"))), "family maximum mismatch")
    _need(ar.lt(fm, tv), "weights do not separate the target")


def _check_fan(data, cert, ar):
    points, g, rho, kind = _fan_instance(data, cert.params)
    P = cert.payload
    if cert.kind == "fan_functional":
        phi = ar.vec(_field(P, "phi"), "phi")
        _need(len(phi) == len(points[0]), "phi has the wrong dimension")
        _need(ar.le(norm(phi, dual_norm_kind(kind)), rho), "phi exceeds the dual-norm bound")
        _need(all(ar.le(gi, sum(a * b for a, b in zip(phi, x))) for gi, x in zip(g, points)), "phi does not dominate")
        return
    _need(cert.kind == "fan_violation", f"unknown kind {cert.kind!r}")
    p = ar.vec(_field(P, "weights"), "weights")
    _need(len(p) == len(points), "weights have the wrong length")
    _need(all(ar.le(0, v) for v in p) and ar.le(sum(p), 1), "weights are not sub-probability")
    combo = [sum(pi * x[k] for pi, x in zip(p, points)) for k in range(len(points[0]))]
    lhs = sum(pi * gi for pi, gi in zip(p, g))
    rhs = rho * norm(combo, kind)
    _need(ar.eq(lhs, ar.num(_field(P, "lhs"))) and ar.eq(rhs, ar.num(_field(P, "rhs"))), "stored sides mismatch")
    _need(ar.lt(rhs, lhs), "displayed inequality is not violated")


def _check_suffice(data, cert, ar):
    H = _matrix(data, cert.params)
    Z = list(cert.params.get("subset") or [])
    _need(Z and all(z in H.col_index for z in Z), "bad subset")
    P = cert.payload
    if cert.kind == "sufficient":
        reps = _field(P, "representations")
        _need(isinstance(reps, list), "representations must be a list")
        seen = set()
        for i, r in enumerate(reps):
            x = r.get("point") if isinstance(r, Mapping) else None
            _need(x in H.col_index, f"representations[{i}]: unknown point")
            m = ar.measure(r.get("measure"), set(Z), f"representations[{i}].measure")
            jx = H.col_index[x]
            for row in H.values:
                _need(ar.le(row[jx], _pair(H, row, m)), f"representations[{i}] fails at some h")
            seen.add(x)
        _need(seen >= set(H.cols) - set(Z), "some point outside the subset lacks a representation")
        return
    _need(cert.kind == "sufficiency_violation", f"unknown kind {cert.kind!r}")
    x = _field(P, "point")
    _need(x in H.col_index and x not in Z, "violation point must lie outside the subset")
    d = ar.measure(_field(P, "delta"), H.row_index, "delta")
    mix = dict(zip(H.cols, _mix(H, d)))
    margin = mix[x] - max(mix[z] for z in Z)
    _need(ar.eq(margin, ar.num(_field(P, "margin"))), "margin mismatch")
    _need(ar.lt(0, margin), "margin is not positive")


def _check_strassen(data, cert, ar):
    F = functionals_from_json(data)
    phi = _phi(cert.params.get("phi"))
    _need(len(phi) == F[0].dimension, "phi has the wrong dimension")
    P = cert.payload
    if cert.kind == "strassen_violation":
        x = ar.vec(_field(P, "x"), "x")
        _need(len(x) == len(phi), "x has the wrong dimension")
        _need(ar.eq(max(abs(v) for v in x), 1), "x is not normalised")
        pv = sum(a * b for a, b in zip(phi, x))
        sv = max(f(x) for f in F)
        _need(ar.eq(pv, ar.num(_field(P, "phi_value"))) and ar.eq(sv, ar.num(_field(P, "sup_value"))), "values mismatch")
        _need(ar.lt(sv, pv), "phi is not above the supremum at x")
        return
    _need(cert.kind == "strassen_decomposition", f"unknown kind {cert.kind!r}")
    byname = {f.name: f for f in F}
    lam = ar.measure(_field(P, "lambda"), byname, "lambda")
    t = {e["name"]: ar.vec(e["vector"], "t") for e in _field(P, "t")}
    hw = {e["name"]: ar.vec(e["weights"], "hull_weights") for e in _field(P, "hull_weights")}
    _need(set(t) == set(byname) == set(hw), "decomposition must cover every functional")
    total = [0] * len(phi)
    for name, f in byname.items():
        c = hw[name]
        _need(len(c) == len(f.generators), f"{name}: wrong number of hull weights")
        _need(all(ar.le(0, v) for v in c) and ar.eq(sum(c), 1), f"{name}: hull weights are not convex")
        comb_ = [sum(ci * a[k] for ci, a in zip(c, f.generators)) for k in range(len(phi))]
        _need(len(t[name]) == len(phi) and all(ar.eq(a, b) for a, b in zip(comb_, t[name])), f"{name}: t outside the hull")
        for k in range(len(phi)):
            total[k] += lam.get(name, 0) * t[name][k]
    _need(all(ar.eq(a, b) for a, b in zip(total, phi)), "λ-average of t differs from phi")


def _check_exhaust(data, cert, ar):
    A = _matrix(data, cert.params).clipped()
    raw = cert.params.get("pieces")
    _need(isinstance(raw, list), "missing pieces")
    try:
        inst = ExhaustionInstance(A, tuple((p["name"], tuple(p["points"])) for p in raw))
    except (ValueError, KeyError, TypeError) as exc:
        raise VerificationError(f"bad pieces: {exc}") from None
    P = cert.payload
    pieces = _field(P, "pieces")
    _need(isinstance(pieces, list) and len(pieces) == len(inst.pieces), "piece list mismatch")
    values = []
    for (name, pts), e in zip(inst.pieces, pieces):
        _need(e.get("name") == name and list(e.get("points", [])) == list(pts), f"piece {name!r} mismatch")
        value = ar.num(e.get("value"), f"{name}.value")
        if pts:
            d = ar.measure(e.get("delta"), set(pts), f"{name}.delta")
            m = ar.measure(e.get("measure"), A.row_index, f"{name}.measure")
            _need(ar.eq(max(_pair(A, row, d) for row in A.values), value), f"{name}: δ does not attain the value")
            mix = _mix(A, m)
            _need(ar.eq(min(mix[A.col_index[x]] for x in pts), value), f"{name}: m does not attain the value")
        else:
            _need(ar.eq(value, 0), f"{name}: empty piece must have value 0")
        values.append(value)
    positive = all(ar.lt(0, v) and not ar.eq(v, 0) for v in values)
    idx = [A.col_index[x] for x in inst.remainder]
    rmax = max((row[j] for row in A.values for j in idx), default=Fraction(0))
    _need(list(_field(P, "remainder")) == list(inst.remainder), "remainder mismatch")
    _need(ar.eq(rmax, ar.num(_field(P, "remainder_max"))), "remainder maximum mismatch")
    cond = _field(P, "conditions")
    null = rmax == 0
    _need(
        cond == {"cardinality": True, "positive_pieces": positive, "null_remainder": null},
        "condition flags mismatch",
    )
    _need(_field(P, "ok") is (positive and null), "overall flag mismatch")


def _check_summing_core(A: FamilyMatrix, g, cert, ar):
    P = cert.payload
    absA = A.absolute()
    if cert.kind == "summing_infinite":
        x = _field(P, "witness")
        _need(x in A.col_index, "unknown witness point")
        j = A.col_index[x]
        _need(g[j] != 0 and all(row[j] == 0 for row in absA.values), "witness point does not block summability")
        return
    _need(cert.kind == "summing_witness", f"unknown kind {cert.kind!r}")
    C = ar.num(_field(P, "C"), "C")
    _need(ar.le(0, C), "negative constant")
    m = ar.measure(_field(P, "m"), absA.row_index, "m")
    mix = _mix(absA, m)
    _need(all(ar.le(abs(gx), C * v) for gx, v in zip(g, mix)), "C·m does not dominate |g|")
    nu = ar.vec(_field(P, "dual"), "dual")
    _need(len(nu) == len(A.cols) and all(ar.le(0, v) for v in nu), "bad dual weights")
    for row in absA.values:
        _need(ar.le(sum(n * v for n, v in zip(nu, row)), 1), "dual weights infeasible")
    _need(ar.eq(sum(n * abs(gx) for n, gx in zip(nu, g)), C), "dual value differs from C")


def _check_summing(data, cert, ar):
    A = _matrix(data, cert.params)
    _check_summing_core(A, _target(A, cert.params.get("target")), cert, ar)


def _check_pietsch(data, cert, ar):
    T = _operator(data)
    p, kind, net, sample = _pietsch_params(cert.params)
    if ar.tol is None:
        _need(p.denominator == 1, "exact certificate with non-integer p")
        A, g = pietsch_instance(T, int(p), net, sample, kind)
        _check_summing_core(A, g, cert, ar)
        return
    import numpy as np

    Tm = np.array([[float(v) for v in r] for r in T])
    N = np.array([[float(v) for v in r] for r in net])
    X = np.array([[float(v) for v in r] for r in sample])
    F = np.abs(N @ X.T) ** float(p)
    ords = {"linf": np.inf, "l1": 1, "l2": 2}
    gv = np.linalg.norm(X @ Tm.T, ord=ords[kind], axis=1) ** float(p)
    A = FamilyMatrix.from_lists(
        [[Fraction(float(v)) for v in row] for row in F],
        rows=[f"n{i + 1}" for i in range(len(net))],
        cols=[f"s{j + 1}" for j in range(len(sample))],
    )
    _check_summing_core(A, tuple(Fraction(float(v)) for v in gv), cert, ar)


_CHECKERS = {
    "minimax": _check_minimax,
    "dominate": _check_dominate,
    "hull": _check_hull,
    "fan": _check_fan,
    "suffice": _check_suffice,
    "strassen": _check_strassen,
    "exhaust": _check_exhaust,
    "summing": _check_summing,
    "pietsch": _check_pietsch,
}


def check_certificate(certificate, data: Any, tolerance: float | None = None) -> bool:
    """True iff the certificate is intact and valid for the instance ``data``."""
    return explain_certificate(certificate, data, tolerance) is None


def explain_certificate(certificate, data: Any, tolerance: float | None = None) -> str | None:
    """``None`` when valid, otherwise the first reason for rejection.

    Float certificates are always checked with a tolerance (``1e-7`` unless
    one is given); exact ones exactly unless a tolerance is passed.
    """
    try:
        raw = certificate.to_json() if isinstance(certificate, Certificate) else certificate
        cert = Certificate.from_json(raw)
        if cert.command not in _CHECKERS:
            return f"unknown command {cert.command!r}"
        if raw.get("payload_hash") != cert.payload_hash:
            return "payload hash mismatch"
        if cert.instance_hash != instance_hash(data):
            return "certificate refers to a different instance"
        if cert.arithmetic not in ("exact", "float"):
            return f"unknown arithmetic {cert.arithmetic!r}"
        if cert.arithmetic == "float" and tolerance is None:
            tolerance = 1e-7
        _CHECKERS[cert.command](data, cert, _Arith(tolerance))
    except VerificationError as exc:
        return str(exc)
    except (ParseError, KeyError, TypeError, ValueError, AttributeError, ZeroDivisionError) as exc:
        return f"malformed certificate: {exc}"
    return None


def is_negative(cert: Certificate) -> bool:
    """Whether the certificate records the negative branch of its decision."""
    if cert.kind == "exhaustion_report":
        return not cert.payload.get("ok", False)
    return cert.kind in NEGATIVE_KINDS


def rehash(raw: Mapping) -> dict:
    """Recompute the payload hash of an edited certificate dictionary."""
    cert = Certificate.from_json(raw)
    out = dict(raw)
    out["payload_hash"] = cert.payload_hash
    return jsonable(out)
