from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from finadd.core import DiscreteMeasure, FamilyMatrix
from finadd.domination import (
    BalanceViolation, Dominated, DominationInstance, FanViolation, InHull, LinearFunctional,
    NotInHull, balance_sides, fan_norm_domination, find_dominating_measure, hull_membership,
    hull_membership_via_domination, pointwise_max_reduction, product_targets, verify_balance,
    verify_dominating, verify_fan_functional, verify_fan_violation,
)
from helpers import labelled, small_rationals

Q = Fraction
UNIT = FamilyMatrix.from_lists([[1, 0], [0, 1]])


def inst(F, G):
    return DominationInstance(FamilyMatrix.from_lists(F), labelled(G, "g"))


def test_row_target_gives_point_mass():
    res = find_dominating_measure(inst([[1, 0], [0, 1]], [[0, 1]]))
    assert isinstance(res, Dominated) and res.measure.as_dict == {"f2": 1}


def test_midpoint_target():
    I = inst([[1, 0], [0, 1]], [["1/2", "1/2"]])
    res = find_dominating_measure(I)
    assert isinstance(res, Dominated) and verify_dominating(I, res.measure)


def test_unit_violation():
    I = inst([[1, 0], [0, 1]], [[1, 1]])
    res = find_dominating_measure(I)
    assert isinstance(res, BalanceViolation)
    assert res.lhs > res.rhs and res.margin == res.lhs - res.rhs
    assert not verify_balance(I, res.pairs)
    # the two point masses of the worked example
    pairs = [("g1", DiscreteMeasure.point_mass("x1")), ("g1", DiscreteMeasure.point_mass("x2"))]
    assert balance_sides(I, pairs) == (2, 1)


def test_verify_balance_edge_cases():
    I = inst([[1, 0], [0, 1]], [[1, 0]])
    assert verify_balance(I, [])
    I2 = DominationInstance(UNIT, FamilyMatrix.from_lists([[1, 0]], rows=["f1"]))
    assert verify_balance(I2, [("f1", DiscreteMeasure.uniform(["x1", "x2"]))])
    with pytest.raises(KeyError):
        verify_balance(I, [("nope", DiscreteMeasure.point_mass("x1"))])


def test_column_mismatch():
    with pytest.raises(ValueError):
        DominationInstance(UNIT, FamilyMatrix.from_lists([[1]], cols=["y"]))


dims = st.tuples(st.integers(1, 4), st.integers(1, 3), st.integers(1, 3))


@st.composite
def instances(draw):
    n, f, g = draw(dims)
    row = st.lists(small_rationals, min_size=n, max_size=n)
    F = draw(st.lists(row, min_size=f, max_size=f))
    G = draw(st.lists(row, min_size=g, max_size=g))
    return inst(F, G)


@settings(max_examples=80, deadline=None)
@given(instances())
def test_dichotomy_and_reduction(I):
    res = find_dominating_measure(I)
    if isinstance(res, Dominated):
        assert verify_dominating(I, res.measure)
    else:
        assert not verify_balance(I, res.pairs)
        assert all(int(n) == n and n >= 1 for _, _, n in res.pairs)
    reduced = find_dominating_measure(pointwise_max_reduction(I))
    assert type(reduced) is type(res)
    if isinstance(res, Dominated):
        assert verify_dominating(pointwise_max_reduction(I), res.measure)


def test_hull_examples():
    assert hull_membership(UNIT, (1, 0)) == InHull(DiscreteMeasure.point_mass("f1"))
    assert hull_membership(UNIT, ("1/2", "1/2")).measure.as_dict == {"f1": Q(1, 2), "f2": Q(1, 2)}
    res = hull_membership(UNIT, (1, 1))
    assert isinstance(res, NotInHull)
    assert res.vector(UNIT.cols) == (Q(1, 2), Q(1, 2))  # (1, 1) normalised to unit l1 mass
    assert res.target_value > res.family_max
    with pytest.raises(ValueError):
        hull_membership(UNIT, (1, 2, 3))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(small_rationals, min_size=3, max_size=3), min_size=1, max_size=3),
       st.lists(small_rationals, min_size=3, max_size=3))
def test_hull_equivalence(F, g):
    A = FamilyMatrix.from_lists(F)
    assert isinstance(hull_membership(A, g), InHull) == hull_membership_via_domination(A, g)


def test_fan_examples():
    pts = [(1, 0), (-1, 0)]
    for kind in ("l1", "linf"):
        res = fan_norm_domination(pts, (1, 1), 5, kind)
        assert isinstance(res, FanViolation) and res.weights == (Q(1, 2), Q(1, 2))
        assert verify_fan_violation(pts, (1, 1), 5, kind, res.weights)
    # g given by a functional of dual norm rho
    pts = [(1, 2), (3, -1), (0, 1)]
    phi0 = (Q(1), Q(-1, 2))
    g = [phi0[0] * x + phi0[1] * y for x, y in pts]
    res = fan_norm_domination(pts, g, 1, "l1")
    assert isinstance(res, LinearFunctional) and verify_fan_functional(pts, g, 1, "l1", res.phi)
    res = fan_norm_domination(pts, g, Q(3, 2), "linf")
    assert isinstance(res, LinearFunctional) and verify_fan_functional(pts, g, Q(3, 2), "linf", res.phi)


@pytest.mark.parametrize("kind, norm_x", [("l1", 5), ("linf", 3)])
def test_fan_single_point_boundary(kind, norm_x):
    x, rho = [(3, -2)], Q(2)
    assert isinstance(fan_norm_domination(x, [rho * norm_x], rho, kind), LinearFunctional)
    assert isinstance(fan_norm_domination(x, [rho * norm_x + Q(1, 100)], rho, kind), FanViolation)


def test_fan_errors():
    with pytest.raises(ValueError):
        fan_norm_domination([], [], 1)
    with pytest.raises(ValueError):
        fan_norm_domination([(1,)], [1], 0)


def test_product_targets_common_extension():
    G = product_targets([["a", "b"], ["c", "d"]], [(0, "g1", [1, 0]), (1, "g2", [0, 1])])
    assert G.cols == ("a,c", "a,d", "b,c", "b,d")
    assert G.row("g1") == (1, 1, 0, 0) and G.row("g2") == (0, 1, 0, 1)
    F = FamilyMatrix.from_lists([[1, 1, 1, 1]], cols=G.cols)
    assert isinstance(find_dominating_measure(DominationInstance(F, G)), Dominated)
