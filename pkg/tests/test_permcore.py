from __future__ import annotations

from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmweyl.errors import DegreeError, GroupSizeError
from cmweyl.permcore import (
    TRANSITIVE,
    TRANSITIVE_ORDERS,
    CMTypeMask,
    Perm,
    PermGroup,
    SignedGroup,
    SignedPerm,
    cm_type_orbit,
    flips_only,
    is_abelian,
    is_transitive,
    labels_of_degree,
    malle_index,
    min_index_and_a,
    reflex_degree_check,
    resolve_label,
    transitive_group,
    wreath_c2,
)


def test_cycle_parsing_round_trip():
    g = Perm.from_cycles("(1,2)(3,4,5)", 5)
    assert g.images == (1, 0, 3, 4, 2)
    assert str(g) == "(1,2)(3,4,5)"
    assert g.order() == 6
    assert Perm.from_cycles("()", 3).is_identity()


@pytest.mark.parametrize("text", ["(1,2", "(1,6)", "(1,1)", "(1,2)(2,3)", "x"])
def test_bad_cycle_notation(text):
    with pytest.raises(ValueError):
        Perm.from_cycles(text, 5)


def test_composition_is_right_to_left():
    a = Perm.from_cycles("(1,2)", 3)
    b = Perm.from_cycles("(2,3)", 3)
    # (a*b)(i) = a(b(i))
    assert (a * b)(2) == a(b(2)) == 0
    assert (a * a.inverse()).is_identity()


def test_transitive_orders_match_table():
    for lab in TRANSITIVE:
        assert transitive_group(lab).order() == TRANSITIVE_ORDERS[lab], lab
        assert is_transitive(transitive_group(lab))


def test_labels_per_degree():
    assert [len(labels_of_degree(d)) for d in range(1, 6)] == [1, 1, 2, 5, 5]
    assert resolve_label("F5", 5) == "5T3"
    assert resolve_label("s4") == "4T5"
    with pytest.raises(DegreeError):
        resolve_label("5T3", 4)


def test_intransitive_group_detected():
    G = PermGroup.from_strings(4, ["(1,2)", "(3,4)"])
    assert not is_transitive(G)
    assert sorted(map(sorted, G.orbits())) == [[0, 1], [2, 3]]


@pytest.mark.parametrize("lab, ind", [("2T1", 1), ("3T1", 2), ("3T2", 1), ("4T1", 2), ("4T2", 2),
                                      ("4T3", 1), ("4T4", 2), ("4T5", 1), ("5T1", 4), ("5T2", 2),
                                      ("5T3", 2), ("5T4", 2), ("5T5", 1)])
def test_malle_index(lab, ind):
    k, a = min_index_and_a(transitive_group(lab))
    assert k == ind
    assert a == Fraction(1, ind)


def test_malle_index_of_single_element():
    assert malle_index(Perm.from_cycles("(1,2,3)(4,5)", 5)) == 3


@pytest.mark.parametrize("lab", list(TRANSITIVE)[1:])
def test_wreath_product_invariants(lab):
    G = transitive_group(lab)
    d = G.degree
    W = wreath_c2(G)
    assert W.order() == 2**d * G.order()
    assert not is_abelian(W)
    assert {cm_type_orbit(W, m) for m in CMTypeMask.all_masks(d)} == {2**d}


def test_wreath_contains_all_flips():
    G = transitive_group("3T1")
    W = set(wreath_c2(G).elements())
    assert set(flips_only(3).elements()) <= W
    assert flips_only(3).order() == 8


def test_group_size_cap():
    with pytest.raises(GroupSizeError):
        wreath_c2(transitive_group("5T5"), cap=1000)


def test_mask_degree_mismatch():
    with pytest.raises(DegreeError):
        cm_type_orbit(wreath_c2(transitive_group("3T1")), CMTypeMask((0, 1)))


def test_quartic_cm_orbits():
    """Orbit of a CM type under Gal(E^c/Q) for the three quartic CM Galois groups."""
    from cmweyl.cm_enum import group_model

    sizes = {t: {cm_type_orbit(group_model(t), m) for m in CMTypeMask.all_masks(2)} for t in ("C4", "V4", "D4")}
    orders = {t: group_model(t).order() for t in ("C4", "V4", "D4")}
    assert orders == {"C4": 4, "V4": 4, "D4": 8}
    # a cyclic quartic CM field is primitive, so its reflex field has degree 4 as well
    assert sizes == {"C4": {4}, "V4": {2}, "D4": {4}}


def test_reflex_degree_check():
    G = transitive_group("5T5")
    assert reflex_degree_check(5, G, 1) == 32
    assert reflex_degree_check(2, G, 10) == 40


def _signed(d):
    return st.builds(
        SignedPerm,
        st.tuples(*[st.integers(0, 1)] * d),
        st.permutations(list(range(d))).map(lambda p: Perm(tuple(p))),
    )


@settings(max_examples=60, deadline=None)
@given(_signed(4), _signed(4), _signed(4))
def test_signed_perm_group_laws(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert (a * a.inverse()).is_identity()
    # the action on masks is a left action
    for bits in product((0, 1), repeat=4):
        m = CMTypeMask(bits)
        assert (a * b).act(m) == a.act(b.act(m))


@settings(max_examples=60, deadline=None)
@given(_signed(3), _signed(3))
def test_point_representation_is_a_homomorphism(a, b):
    assert (a * b).to_points() == a.to_points() * b.to_points()
    # complex conjugation (all flips) is central
    conj = SignedPerm((1, 1, 1), Perm.identity(3))
    assert a * conj == conj * a


def test_signed_group_identity_and_order():
    W = SignedGroup(2, (SignedPerm((1, 0), Perm((1, 0))),))
    assert W.order() == 4
