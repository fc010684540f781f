import random
from fractions import Fraction

import pytest

from finadd.core import DiscreteMeasure, FamilyMatrix
from finadd.representation import (
    NoRepresentation, PolyhedralSublinear, StrassenDecomposition, StrassenDominated,
    StrassenViolation, Sufficient, SufficiencyInstance, SufficiencyViolation, check_sufficiency,
    functionals_from_json, functionals_to_json, representing_measure, strassen_decompose,
    strassen_dominated, verify_decomposition, verify_representing,
)
from helpers import random_matrix

Q = Fraction
# coordinate functionals and their negatives on the square's vertices a..d and centre o
SQUARE = FamilyMatrix(
    ("h1", "h2", "h3", "h4"),
    ("a", "b", "c", "d", "o"),
    ((1, 1, -1, -1, 0), (-1, -1, 1, 1, 0), (1, -1, 1, -1, 0), (-1, 1, -1, 1, 0)),
)
VERTICES = ("a", "b", "c", "d")
ABS = [PolyhedralSublinear("abs", [[1], [-1]])]


def test_whole_set_is_sufficient():
    assert isinstance(check_sufficiency(SufficiencyInstance(SQUARE, SQUARE.cols)), Sufficient)


def test_square_vertices_are_sufficient():
    inst = SufficiencyInstance(SQUARE, VERTICES)
    res = check_sufficiency(inst)
    assert isinstance(res, Sufficient) and all(v <= 0 for _, v in res.margins)
    m = representing_measure(inst, "o")
    assert verify_representing(SQUARE, "o", m, VERTICES)
    assert verify_representing(SQUARE, "o", DiscreteMeasure.uniform(VERTICES), VERTICES)


def test_single_function_violation():
    H = FamilyMatrix.from_lists([[0, 1]])
    inst = SufficiencyInstance(H, ("x1",))
    res = check_sufficiency(inst)
    assert isinstance(res, SufficiencyViolation)
    assert res.point == "x2" and res.delta.as_dict == {"f1": 1} and res.margin == 1
    assert isinstance(representing_measure(inst, "x2"), NoRepresentation)


def test_point_in_subset_is_its_own_representation():
    inst = SufficiencyInstance(SQUARE, VERTICES)
    assert representing_measure(inst, "b") == DiscreteMeasure.point_mass("b")


def test_subset_validation():
    with pytest.raises(ValueError):
        SufficiencyInstance(SQUARE, ())
    with pytest.raises(ValueError):
        SufficiencyInstance(SQUARE, ("zz",))


def test_chain_uses_least_member():
    inst = SufficiencyInstance(SQUARE, SQUARE.cols)
    m = representing_measure(inst, "o", chain=[SQUARE.cols, VERTICES])
    assert set(m.support) <= set(VERTICES)
    with pytest.raises(ValueError, match="linearly ordered"):
        representing_measure(inst, "o", chain=[("a", "b"), ("c", "d", "o")])


def test_sufficiency_equivalence_and_chain_monotonicity():
    rng = random.Random(5)
    for _ in range(60):
        H = random_matrix(rng, rng.randint(1, 3), rng.randint(2, 5), lo=-3, hi=3, maxden=2)
        Z = tuple(x for x in H.cols if rng.random() < 0.5) or (H.cols[0],)
        inst = SufficiencyInstance(H, Z)
        sufficient = isinstance(check_sufficiency(inst), Sufficient)
        reps = {x: representing_measure(inst, x) for x in H.cols}
        assert sufficient == all(isinstance(m, DiscreteMeasure) for m in reps.values())
        bigger = Z + tuple(x for x in H.cols if x not in Z)[:1]
        for x, m in reps.items():
            if isinstance(m, DiscreteMeasure):
                assert verify_representing(H, x, m, Z)
                assert verify_representing(H, x, m, bigger)


def test_strassen_examples():
    assert isinstance(strassen_dominated([1], ABS), StrassenDominated)
    assert isinstance(strassen_dominated([Q(1, 3)], ABS), StrassenDominated)
    res = strassen_dominated([2], ABS)
    assert isinstance(res, StrassenViolation) and res.x == (1,)
    assert (res.phi_value, res.sup_value) == (2, 1)


def test_strassen_decomposition_worked_example():
    dec = strassen_decompose([Q(1, 3)], ABS)
    assert isinstance(dec, StrassenDecomposition)
    assert dec.lam.as_dict == {"abs": 1}
    assert dict(dec.t)["abs"] == (Q(1, 3),)
    assert dict(dec.hull_weights)["abs"] == (Q(2, 3), Q(1, 3))
    assert verify_decomposition([Q(1, 3)], ABS, dec)


def test_strassen_zero_and_copies():
    F = [PolyhedralSublinear("p", [[1, 0], [-1, 0], [0, 1], [0, -1]]), PolyhedralSublinear("q", [[2, 2]])]
    dec = strassen_decompose([0, 0], F)
    assert dec.lam.as_dict == {"p": 1} and dict(dec.t)["p"] == (0, 0)
    copies = ABS + [PolyhedralSublinear("abs2", [[1], [-1]])]
    assert verify_decomposition([Q(1, 5)], copies, strassen_decompose([Q(1, 5)], copies))
    # any split of the mass between identical copies verifies
    split = StrassenDecomposition(
        DiscreteMeasure({"abs": Q(1, 2), "abs2": Q(1, 2)}),
        (("abs", (Q(1, 5),)), ("abs2", (Q(1, 5),))),
        (("abs", (Q(3, 5), Q(2, 5))), ("abs2", (Q(3, 5), Q(2, 5)))),
    )
    assert verify_decomposition([Q(1, 5)], copies, split)


def test_strassen_dimension_mismatch():
    with pytest.raises(ValueError):
        strassen_dominated([1, 2], ABS)
    with pytest.raises(ValueError):
        PolyhedralSublinear("bad", [[1], [1, 2]])


def test_functional_json_round_trip():
    F = ABS + [PolyhedralSublinear("g", [["1/2"]])]
    again = functionals_from_json(functionals_to_json(F))
    assert again == F
    assert again[0]([Q(-3)]) == 3
