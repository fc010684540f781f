import random
from fractions import Fraction

import pytest
from hypothesis import given, settings

from finadd.core import DiscreteMeasure, FamilyMatrix
from finadd.minimax import (
    dominated_interval, find_sub_barycentre, game_value, guarantee, hull_minimax, is_concave_like,
    local_lower_value, local_minimax, lower_value, minimax_report, mixture_max, upper_value,
)
from helpers import matrices, random_matrix, vertex_hull_value

Q = Fraction
PENNIES = FamilyMatrix.from_lists([[1, -1], [-1, 1]])
SKEW = FamilyMatrix.from_lists([[0, 6], [3, 0]])

# values frozen from vertex enumeration of the epigraph LP (tests/helpers.py)
FROZEN = [
    ([["3", "-3/4"], ["-1/2", "2"], ["2", "0"]], "8/9"),
    ([["-3/4", "-5/2"], ["4", "1/2"], ["5", "-5/3"], ["1", "1"]], "-3/4"),
    ([["4/3", "9/2", "2"], ["-3", "-2", "-1/3"], ["9/4", "-2", "-1"]], "-45/71"),
    ([["-5/2", "1/2", "-5/3"], ["1", "1/4", "-2"], ["1/2", "9", "-3"]], "3/10"),
    ([["5/2", "1"], ["-7/2", "0"]], "0"),
    ([["-1/4", "7/4", "2"], ["-7/3", "0", "-5/3"], ["7", "3", "-3/4"], ["-2", "1/3", "-2"]], "0"),
]


def test_matching_pennies():
    rep = minimax_report(PENNIES)
    assert (rep.lower, rep.hull_value, rep.upper) == (-1, 0, 1)
    assert rep.optimal_measure.as_dict == {"f1": Q(1, 2), "f2": Q(1, 2)}
    assert rep.point_weights.as_dict == {"x1": Q(1, 2), "x2": Q(1, 2)}
    assert rep.concave_like is False
    v = rep.concavity_violation
    assert (v.lo, v.hi) == (0, 1)
    assert rep.sub_barycentre is None


def test_skew_game():
    g = game_value(SKEW)
    assert g.value == 2
    assert g.measure.as_dict == {"f1": Q(1, 3), "f2": Q(2, 3)}
    # the point weights equalise the two rows: 6 h2 = 3 h1
    assert g.point_weights.as_dict == {"x1": Q(2, 3), "x2": Q(1, 3)}
    assert guarantee(SKEW, g.point_weights) == mixture_max(SKEW, g.measure) == 2


def test_single_entry():
    A = FamilyMatrix.from_lists([[5]])
    assert hull_minimax(A).value == lower_value(A) == upper_value(A) == 5


@pytest.mark.parametrize("values, expected", FROZEN)
def test_frozen_hull_values(values, expected):
    assert hull_minimax(FamilyMatrix.from_lists(values)).value == Q(expected)


def test_vertex_oracle_agrees_on_random_instances():
    rng = random.Random(11)
    for _ in range(25):
        A = random_matrix(rng, rng.randint(1, 4), rng.randint(1, 4))
        assert hull_minimax(A).value == vertex_hull_value(A)


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_sandwich_and_duality(A):
    h = hull_minimax(A)
    g = game_value(A)
    assert lower_value(A) <= h.value <= upper_value(A)
    assert h.value == g.value
    assert mixture_max(A, h.measure) == h.value
    assert guarantee(A, g.point_weights) == h.value


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_concave_like_forces_equality(A):
    concave, violation = is_concave_like(A)
    if concave:
        assert hull_minimax(A).value == lower_value(A)
    else:
        t = violation.sample_t
        a, b = A.column(violation.x), A.column(violation.x2)
        mix = [t * u + (1 - t) * v for u, v in zip(a, b)]
        assert not any(all(m <= c for m, c in zip(mix, A.column(x))) for x in A.cols)


def test_dominated_interval():
    assert dominated_interval((0,), (2,), (1,)) == (Q(1, 2), 1)
    assert dominated_interval((0,), (0,), (-1,)) is None
    assert dominated_interval((1, 0), (0, 1), (1, 1)) == (0, 1)


def test_monotone_family_is_concave_like():
    A = FamilyMatrix.from_lists([[0, 1, 3], [1, 1, 2], [-1, 0, 5]])
    assert is_concave_like(A) == (True, None)
    assert hull_minimax(A).value == lower_value(A) == 2


def test_sub_barycentre():
    m = DiscreteMeasure.uniform(["x1", "x2"])
    assert find_sub_barycentre(FamilyMatrix.from_lists([[1, 3], [0, 2]]), m) == "x1"
    assert find_sub_barycentre(FamilyMatrix.from_lists([[1, 3], [2, 0]]), m) is None
    with pytest.raises(KeyError):
        find_sub_barycentre(PENNIES, DiscreteMeasure.point_mass("nope"))


def test_upper_collapses_with_sub_barycentre():
    A = FamilyMatrix.from_lists([[0, 1, 3], [1, 1, 2], [-1, 0, 5]])
    rep = minimax_report(A)
    assert rep.sub_barycentre == "f2"
    assert rep.upper == rep.hull_value == rep.lower


def test_local_minimax():
    res = local_minimax(SKEW, [["f1"], ["f2"]])
    assert res.value == 3 and res.index == 1
    assert res.measure.as_dict == {"f2": 1}
    assert local_minimax(SKEW, [["f1", "f2"]]).value == 2
    assert local_lower_value(SKEW, [["f1"], ["f2"]]) == 3
    with pytest.raises(ValueError):
        local_minimax(SKEW, [])


def test_game_value_with_generators():
    H = [DiscreteMeasure.uniform(["x1", "x2"])]
    g = game_value(PENNIES, H)
    assert g.value == 0
    with pytest.raises(KeyError):
        game_value(PENNIES, [DiscreteMeasure.point_mass("zz")])
