from __future__ import annotations

from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmweyl.errors import HypothesisError
from cmweyl.exponents import (
    ExponentInput,
    ExponentSet,
    _DELTA_ROWS,
    alpha,
    beta,
    beta_max,
    c1,
    c2_c3,
    known_delta,
    parse_rational,
    table_entries,
    table_lookup,
)


def test_parse_rational():
    assert parse_rational("2/5") == F(2, 5)
    assert parse_rational(" 0.25 ") == F(1, 4)
    assert parse_rational(3) == F(3)
    with pytest.raises(ValueError):
        parse_rational("two fifths")
    with pytest.raises(ValueError):
        parse_rational("1/0")


def test_golden_example():
    inp = ExponentInput(5, "2/5", 1, "1/2")
    assert c1(inp) == F(3, 10)
    assert alpha(inp) == F(19, 25)
    assert beta(inp) == F(17, 20)
    es = c2_c3([inp])
    assert (es.C1, es.alpha, es.beta, es.C2, es.C3) == (F(3, 10), F(19, 25), F(17, 20), F(3, 20), F(3, 20))
    assert all(isinstance(v, F) for v in (es.C1, es.alpha, es.beta, es.C2, es.C3))


def test_unconditional_example():
    inp = ExponentInput(5, 0, 1, 0)
    assert c1(inp) == F(1, 2)
    assert alpha(inp) == F(1, 2)
    assert beta(inp) == F(1, 2)
    assert c2_c3([inp]).C3 == F(1, 2)


def test_hypothesis_boundary_rejected():
    inp = ExponentInput(5, "1/2", "3/2", 0)
    assert not inp.hypothesis_ok
    with pytest.raises(HypothesisError):
        c1(inp)
    with pytest.raises(HypothesisError):
        c2_c3([inp])


def test_input_ranges():
    with pytest.raises(ValueError):
        ExponentInput(5, "3/5", 1, 0)
    with pytest.raises(ValueError):
        ExponentInput(5, 0, 0, 0)
    with pytest.raises(ValueError):
        ExponentInput(5, 0, 1, "-1/3")


def test_small_malle_exponent_limit():
    inp = ExponentInput(3, 0, F(1, 10**6), 0)
    assert alpha(inp) == F(1, 2 * 10**6)


def test_c3_is_min_over_groups():
    d, delta, dp = 5, F(2, 5), F(1, 2)
    inputs = [ExponentInput(d, delta, m, dp, lab) for lab, m in (("5T1", F(1, 4)), ("5T5", F(1)))]
    es = c2_c3(inputs)
    assert es.beta_max == beta_max(inputs) == max(beta(i) for i in inputs)
    assert es.C3 == min(g["C2"] for g in es.per_group.values())
    for g in es.per_group.values():
        assert g["C2"] == min(g["C1"], 1 - es.beta_max)
    assert ExponentSet.from_dict(es.to_dict()).to_dict() == es.to_dict()


def test_mixed_inputs_rejected():
    with pytest.raises(ValueError):
        c2_c3([ExponentInput(5, 0, 1, 0), ExponentInput(4, 0, 1, 0)])


@pytest.mark.parametrize("d, lab, M", [
    (2, "2T1", F(1)),
    (3, "3T1", F(1, 2)),
    (3, "3T2", F(1)),
    (4, "4T1", F(1, 2)),
    (4, "4T2", F(1, 2)),
    (4, "4T5", F(1)),
    (5, "5T1", F(1, 4)),
    (5, "5T5", F(1)),
    (6, "6T12", F(8, 5)),
    (7, "7T2", F(10, 21)),
])
def test_table_lookup(d, lab, M):
    assert table_lookup(d, lab)[0] == M


def test_table_rows_sum_to_two():
    for lab, (M, bound) in _DELTA_ROWS.items():
        assert M + bound == 2, lab
    assert table_lookup(6, "6T12")[2] == F(2, 5)


def test_dihedral_seven_has_two_rows():
    rows = {e.M_G for e in table_entries(7, "7T2")}
    assert {F(10, 21), F(19, 12)} <= rows


def test_known_delta():
    assert known_delta(2) == 0
    assert known_delta(5) == F(2, 5)


rat = st.fractions(min_value=0, max_value=F(1, 2), max_denominator=50)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 8), rat, st.fractions(min_value=F(1, 50), max_value=F(3, 2), max_denominator=50), rat)
def test_exponent_invariants(d, delta, M, dp):
    inp = ExponentInput(d, delta, M, dp)
    if not inp.hypothesis_ok:
        with pytest.raises(HypothesisError):
            alpha(inp)
        return
    a, b, c = alpha(inp), beta(inp), c1(inp)
    assert 0 < c <= F(1, 2)
    assert a < 1 and b < 1
    assert b >= a
    if dp == 0:
        assert b == a
    es = c2_c3([inp])
    assert es.C2 == min(c, 1 - b) == es.C3
