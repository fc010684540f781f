"""Exact scalars, function families, discrete measures and certificates.

Every object here is an immutable value.  A family of functions ``F`` on a
finite set ``X`` is stored as a rational matrix whose rows are the functions
and whose columns are the points; a finitely additive probability on a
finite set is nothing but a nonnegative weight vector of mass one, so every
integral below is a finite weighted sum and carries no approximation error.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from functools import cached_property
from typing import Any, Iterable, Mapping, Sequence

Rational = Fraction


class ParseError(ValueError):
    """Malformed instance or certificate data; ``path`` locates the offending item."""

    def __init__(self, message: str, path: str = "") -> None:
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


def to_rational(value: Any, path: str = "") -> Fraction:
    """Convert an int, Fraction, Decimal, ``"p/q"`` or decimal string exactly.

    Binary floats are rejected: they rarely hold the value the author meant.
    """
    if isinstance(value, bool):
        raise ParseError(f"boolean {value!r} is not a scalar", path)
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, Decimal):
        if not value.is_finite():
            raise ParseError(f"non-finite scalar {value!r}", path)
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            pass
        try:
            dec = Decimal(text)
        except InvalidOperation:
            raise ParseError(f"cannot parse {value!r} as a rational", path) from None
        if not dec.is_finite():
            raise ParseError(f"non-finite scalar {value!r}", path)
        return Fraction(dec)
    raise ParseError(f"unsupported scalar {value!r} of type {type(value).__name__}", path)


def format_rational(value: Fraction | int) -> str:
    """Canonical text form; ``to_rational(format_rational(r)) == r``."""
    return str(Fraction(value))


def to_vector(values: Iterable[Any], path: str = "") -> tuple[Fraction, ...]:
    return tuple(to_rational(v, f"{path}[{i}]") for i, v in enumerate(values))


def _check_labels(labels: Sequence[str], what: str, allow_empty: bool = False) -> None:
    if not labels and not allow_empty:
        raise ValueError(f"at least one {what} is required")
    if len(set(labels)) != len(labels):
        seen: set[str] = set()
        dup = next(lab for lab in labels if lab in seen or seen.add(lab))
        raise ValueError(f"duplicate {what} label {dup!r}")


@dataclass(frozen=True)
class FamilyMatrix:
    """A finite family ``F`` of functions on a finite set ``X``.

    ``values[i][j]`` is ``f_i(x_j)`` with ``f_i = rows[i]`` and
    ``x_j = cols[j]``.
    """

    rows: tuple[str, ...]
    cols: tuple[str, ...]
    values: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "rows", tuple(self.rows))
        object.__setattr__(self, "cols", tuple(self.cols))
        object.__setattr__(
            self, "values", tuple(tuple(Fraction(v) for v in r) for r in self.values)
        )
        # an empty family is allowed so that target sets may be empty
        _check_labels(self.rows, "function", allow_empty=True)
        _check_labels(self.cols, "point")
        if len(self.values) != len(self.rows):
            raise ValueError(f"{len(self.rows)} row labels but {len(self.values)} rows")
        for label, row in zip(self.rows, self.values):
            if len(row) != len(self.cols):
                raise ValueError(
                    f"row {label!r} has {len(row)} values, expected {len(self.cols)}"
                )

    @classmethod
    def from_lists(
        cls,
        values: Sequence[Sequence[Any]],
        rows: Sequence[str] | None = None,
        cols: Sequence[str] | None = None,
    ) -> "FamilyMatrix":
        """Build from nested scalars, naming rows ``f1..`` and columns ``x1..`` by default."""
        if not values:
            raise ValueError("at least one function is required")
        rows = tuple(rows) if rows is not None else tuple(f"f{i + 1}" for i in range(len(values)))
        width = len(values[0])
        cols = tuple(cols) if cols is not None else tuple(f"x{j + 1}" for j in range(width))
        return cls(rows, cols, tuple(to_vector(r) for r in values))

    @cached_property
    def row_index(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.rows)}

    @cached_property
    def col_index(self) -> dict[str, int]:
        return {lab: j for j, lab in enumerate(self.cols)}

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.cols)

    def row(self, label: str) -> tuple[Fraction, ...]:
        try:
            return self.values[self.row_index[label]]
        except KeyError:
            raise KeyError(f"unknown function {label!r}") from None

    def column(self, label: str) -> tuple[Fraction, ...]:
        try:
            j = self.col_index[label]
        except KeyError:
            raise KeyError(f"unknown point {label!r}") from None
        return tuple(r[j] for r in self.values)

    def value(self, f: str, x: str) -> Fraction:
        return self.values[self.row_index[f]][self.col_index[x]]

    def transpose(self) -> "FamilyMatrix":
        """Swap roles: points become functions (the evaluations ``e_x``) and vice versa."""
        return FamilyMatrix(self.cols, self.rows, tuple(zip(*self.values)))

    def restrict_rows(self, labels: Iterable[str]) -> "FamilyMatrix":
        labels = tuple(labels)
        return FamilyMatrix(labels, self.cols, tuple(self.row(f) for f in labels))

    def restrict_cols(self, labels: Iterable[str]) -> "FamilyMatrix":
        labels = tuple(labels)
        idx = [self.col_index[x] for x in labels]
        return FamilyMatrix(self.rows, labels, tuple(tuple(r[j] for j in idx) for r in self.values))

    def map_values(self, fn) -> "FamilyMatrix":
        return FamilyMatrix(self.rows, self.cols, tuple(tuple(fn(v) for v in r) for r in self.values))

    def scaled(self, c: Fraction | int) -> "FamilyMatrix":
        c = Fraction(c)
        return self.map_values(lambda v: c * v)

    def absolute(self) -> "FamilyMatrix":
        return self.map_values(abs)

    def clipped(self) -> "FamilyMatrix":
        """``|f| ∧ 1`` applied entrywise."""
        return self.map_values(lambda v: min(abs(v), Fraction(1)))

    def vector(self, values: Mapping[str, Any] | Sequence[Any], path: str = "") -> tuple[Fraction, ...]:
        """Coerce a point-indexed vector (mapping by label or sequence in column order)."""
        if isinstance(values, Mapping):
            unknown = set(values) - set(self.cols)
            if unknown:
                raise ParseError(f"unknown point(s) {sorted(unknown)}", path)
            return tuple(to_rational(values.get(x, 0), f"{path}.{x}") for x in self.cols)
        vec = to_vector(values, path)
        if len(vec) != len(self.cols):
            raise ValueError(f"vector of length {len(vec)} does not match {len(self.cols)} points")
        return vec

    def to_json(self) -> dict:
        return {
            "points": list(self.cols),
            "functions": [
                {"name": f, "values": [format_rational(v) for v in row]}
                for f, row in zip(self.rows, self.values)
            ],
        }

    @classmethod
    def from_json(cls, data: Any, path: str = "", allow_empty: bool = False) -> "FamilyMatrix":
        if not isinstance(data, Mapping):
            raise ParseError("instance must be a JSON object", path)
        points = data.get("points")
        if not isinstance(points, list) or not all(isinstance(p, str) for p in points):
            raise ParseError("'points' must be a list of strings", _join(path, "points"))
        functions = data.get("functions")
        if not isinstance(functions, list):
            raise ParseError("'functions' must be a list", _join(path, "functions"))
        if not functions and not allow_empty:
            raise ParseError("at least one function is required", _join(path, "functions"))
        rows, values = [], []
        for i, item in enumerate(functions):
            where = _join(path, f"functions[{i}]")
            if not isinstance(item, Mapping) or "name" not in item or "values" not in item:
                raise ParseError("expected {'name': ..., 'values': [...]}", where)
            vals = item["values"]
            if not isinstance(vals, list):
                raise ParseError("'values' must be a list", f"{where}.values")
            if len(vals) != len(points):
                raise ParseError(
                    f"{len(vals)} values for {len(points)} points", f"{where}.values"
                )
            rows.append(str(item["name"]))
            values.append(to_vector(vals, f"{where}.values"))
        try:
            return cls(tuple(rows), tuple(points), tuple(values))
        except ValueError as exc:
            raise ParseError(str(exc), path) from None


def _join(path: str, key: str) -> str:
    return f"{path}.{key}" if path else key


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finitely supported nonnegative weights keyed by label.

    Zero weights are dropped, so ``support`` is exactly the set of labels
    carrying positive mass.  A probability (mass one) with finite support
    over points is an element of ``Δ(X)``.
    """

    weights: tuple[tuple[str, Fraction], ...] = field(default=())

    def __post_init__(self) -> None:
        items = self.weights.items() if isinstance(self.weights, Mapping) else self.weights
        cleaned: dict[str, Fraction] = {}
        for label, w in items:
            w = to_rational(w) if not isinstance(w, Fraction) else w
            if w < 0:
                raise ValueError(f"negative weight {w} on {label!r}")
            if label in cleaned:
                raise ValueError(f"duplicate label {label!r}")
            cleaned[label] = w
        object.__setattr__(
            self, "weights", tuple((lab, w) for lab, w in cleaned.items() if w != 0)
        )

    @classmethod
    def point_mass(cls, label: str) -> "DiscreteMeasure":
        return cls(((label, Fraction(1)),))

    @classmethod
    def uniform(cls, labels: Iterable[str]) -> "DiscreteMeasure":
        labels = list(labels)
        if not labels:
            raise ValueError("uniform measure needs at least one label")
        return cls(tuple((lab, Fraction(1, len(labels))) for lab in labels))

    @classmethod
    def from_vector(cls, labels: Sequence[str], weights: Sequence[Any]) -> "DiscreteMeasure":
        if len(labels) != len(weights):
            raise ValueError("labels and weights differ in length")
        return cls(tuple(zip(labels, (Fraction(w) for w in weights))))

    @property
    def support(self) -> tuple[str, ...]:
        return tuple(lab for lab, _ in self.weights)

    @cached_property
    def as_dict(self) -> dict[str, Fraction]:
        return dict(self.weights)

    def __getitem__(self, label: str) -> Fraction:
        return self.as_dict.get(label, Fraction(0))

    def __len__(self) -> int:
        return len(self.weights)

    @property
    def mass(self) -> Fraction:
        return sum((w for _, w in self.weights), Fraction(0))

    @property
    def is_probability(self) -> bool:
        return self.mass == 1

    def normalized(self) -> "DiscreteMeasure":
        total = self.mass
        if total == 0:
            raise ValueError("cannot normalize the zero measure")
        return DiscreteMeasure(tuple((lab, w / total) for lab, w in self.weights))

    def vector(self, labels: Sequence[str]) -> tuple[Fraction, ...]:
        return tuple(self[lab] for lab in labels)

    def to_json(self) -> dict[str, str]:
        return {lab: format_rational(w) for lab, w in self.weights}

    @classmethod
    def from_json(cls, data: Any, path: str = "") -> "DiscreteMeasure":
        if not isinstance(data, Mapping):
            raise ParseError("measure must be an object mapping labels to weights", path)
        try:
            return cls(tuple((str(k), to_rational(v, f"{path}.{k}")) for k, v in data.items()))
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(str(exc), path) from None


def integral(m: DiscreteMeasure, A: FamilyMatrix) -> tuple[Fraction, ...]:
    """Pointwise mixture ``x ↦ Σ_f m(f) f(x)``, aligned with ``A.cols``.

    For a probability ``m`` the result is a point of the integral hull of
    the family.
    """
    out = [Fraction(0)] * len(A.cols)
    for label, w in m.weights:
        if label not in A.row_index:
            raise KeyError(f"measure charges unknown function {label!r}")
        row = A.values[A.row_index[label]]
        for j, v in enumerate(row):
            out[j] += w * v
    return tuple(out)


def point_average(m: DiscreteMeasure, A: FamilyMatrix) -> tuple[Fraction, ...]:
    """``f ↦ Σ_x m(x) f(x)`` for a measure over the points, aligned with ``A.rows``."""
    return integral(m, A.transpose())


def finite_approximation(
    m: DiscreteMeasure, A: FamilyMatrix
) -> tuple[tuple[str, ...], tuple[Fraction, ...]]:
    """Points and convex weights reproducing every integral ``∫ f dm``.

    On a finite set the approximation by finitely many point evaluations is
    exact: the support of ``m`` and its weights already give error zero.
    """
    if not m.is_probability:
        raise ValueError("finite_approximation expects a probability measure")
    for label in m.support:
        if label not in A.col_index:
            raise KeyError(f"measure charges unknown point {label!r}")
    return m.support, tuple(w for _, w in m.weights)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


# -- certificates -------------------------------------------------------------


def jsonable(obj: Any) -> Any:
    """Recursively replace rationals by their canonical strings."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, Fraction)):
        return format_rational(obj)
    if isinstance(obj, float):
        return obj
    if isinstance(obj, DiscreteMeasure):
        return obj.to_json()
    if isinstance(obj, FamilyMatrix):
        return obj.to_json()
    if isinstance(obj, Mapping):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def canonical_json(obj: Any) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def content_hash(obj: Any) -> str:
    return "sha256:" + hashlib.sha256(canonical_json(obj).encode()).hexdigest()


@dataclass(frozen=True)
class Certificate:
    """A verifiable witness emitted by one of the decision procedures.

    ``kind`` names the payload shape (``dominating_measure``,
    ``balance_violation``, ``duality_pair`` ...).  ``params`` holds the
    call arguments beyond the instance file, and ``instance_hash`` pins
    the instance the witness refers to.  ``payload_hash`` covers every other
    field, so any edit to a stored value is detected even when the edited
    witness would still be mathematically valid.
    """

    command: str
    kind: str
    payload: Mapping[str, Any]
    params: Mapping[str, Any] = field(default_factory=dict)
    instance_hash: str = ""
    arithmetic: str = "exact"

    def body(self) -> dict:
        return {
            "arithmetic": self.arithmetic,
            "command": self.command,
            "kind": self.kind,
            "instance_hash": self.instance_hash,
            "params": jsonable(self.params),
            "payload": jsonable(self.payload),
        }

    @property
    def payload_hash(self) -> str:
        return content_hash(self.body())

    def to_json(self) -> dict:
        out = self.body()
        out["payload_hash"] = self.payload_hash
        return out

    @classmethod
    def from_json(cls, data: Any) -> "Certificate":
        if not isinstance(data, Mapping):
            raise ParseError("certificate must be a JSON object")
        for key in ("command", "kind", "payload"):
            if key not in data:
                raise ParseError(f"missing key {key!r}", "certificate")
        return cls(
            command=str(data["command"]),
            kind=str(data["kind"]),
            payload=data["payload"],
            params=data.get("params", {}) or {},
            instance_hash=str(data.get("instance_hash", "")),
            arithmetic=str(data.get("arithmetic", "exact")),
        )
