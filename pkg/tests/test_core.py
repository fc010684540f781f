import json
from decimal import Decimal
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from finadd.core import (
    Certificate,
    DiscreteMeasure,
    FamilyMatrix,
    ParseError,
    canonical_json,
    content_hash,
    format_rational,
    integral,
    point_average,
    to_rational,
)


@given(st.fractions())
def test_rational_round_trip(r):
    assert to_rational(format_rational(r)) == r


@pytest.mark.parametrize(
    "text, expected",
    [("3/4", Fraction(3, 4)), ("-2", Fraction(-2)), ("0.125", Fraction(1, 8)), (7, Fraction(7)),
     (Decimal("1.5"), Fraction(3, 2)), (" 1/3 ", Fraction(1, 3))],
)
def test_to_rational_accepts(text, expected):
    assert to_rational(text) == expected


@pytest.mark.parametrize("bad", [0.5, True, "1/0", "abc", None, "nan", [1]])
def test_to_rational_rejects(bad):
    with pytest.raises(ParseError):
        to_rational(bad)


def test_integer_format_has_no_denominator():
    assert format_rational(Fraction(4, 2)) == "2"
    assert format_rational(Fraction(-6, 4)) == "-3/2"


def test_family_matrix_validation():
    with pytest.raises(ValueError, match="duplicate"):
        FamilyMatrix(("f", "f"), ("x",), ((1,), (2,)))
    with pytest.raises(ValueError, match="values"):
        FamilyMatrix(("f",), ("x", "y"), ((1,),))
    with pytest.raises(ValueError):
        FamilyMatrix.from_lists([])


def test_json_round_trip_is_exact():
    A = FamilyMatrix.from_lists([["1/3", "0.25"], [-2, "7/5"]])
    again = FamilyMatrix.from_json(json.loads(json.dumps(A.to_json())))
    assert again == A
    assert canonical_json(again) == canonical_json(A)


def test_parse_errors_carry_positions():
    data = {"points": ["x", "y"], "functions": [{"name": "f", "values": [1, "z"]}]}
    with pytest.raises(ParseError, match=r"functions\[0\]\.values\[1\]"):
        FamilyMatrix.from_json(data)
    with pytest.raises(ParseError, match="2 values for 1 points"):
        FamilyMatrix.from_json({"points": ["x"], "functions": [{"name": "f", "values": [1, 2]}]})
    with pytest.raises(ParseError, match="points"):
        FamilyMatrix.from_json({"functions": []})


def test_transpose_and_restrict():
    A = FamilyMatrix.from_lists([[1, 2, 3], [4, 5, 6]])
    assert A.transpose().transpose() == A
    assert A.transpose().row("x2") == (2, 5)
    assert A.restrict_cols(["x3", "x1"]).values == ((3, 1), (6, 4))
    assert A.restrict_rows(["f2"]).values == ((4, 5, 6),)
    assert A.scaled(-1).absolute() == A
    assert FamilyMatrix.from_lists([[-3, "1/2"]]).clipped().values == ((1, Fraction(1, 2)),)


def test_measure_basics():
    m = DiscreteMeasure({"a": "1/2", "b": 0, "c": "1/2"})
    assert m.support == ("a", "c")
    assert m.is_probability and m["b"] == 0
    assert DiscreteMeasure.uniform(["p", "q", "r", "s"]).as_dict["q"] == Fraction(1, 4)
    with pytest.raises(ValueError):
        DiscreteMeasure({"a": -1})
    assert DiscreteMeasure.from_json(m.to_json()) == m


def test_integrals():
    A = FamilyMatrix.from_lists([[1, 0], [0, 1]])
    m = DiscreteMeasure({"f1": "1/4", "f2": "3/4"})
    assert integral(m, A) == (Fraction(1, 4), Fraction(3, 4))
    assert point_average(DiscreteMeasure.point_mass("x2"), A) == (0, 1)


def test_hashes_are_deterministic_and_sensitive():
    A = FamilyMatrix.from_lists([[1, 2]])
    assert content_hash(A) == content_hash(FamilyMatrix.from_lists([["1", "2/1"]]))
    assert content_hash(A) != content_hash(FamilyMatrix.from_lists([[1, 3]]))


def test_certificate_json_round_trip():
    cert = Certificate("minimax", "minimax_report", {"lower": Fraction(1, 2)}, {"transpose": False}, "sha256:0")
    raw = json.loads(json.dumps(cert.to_json()))
    again = Certificate.from_json(raw)
    assert again.payload_hash == raw["payload_hash"] == cert.payload_hash
    with pytest.raises(ParseError):
        Certificate.from_json({"command": "x"})
