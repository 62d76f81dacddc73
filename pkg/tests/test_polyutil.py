from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmweyl.polyutil import discriminant, factor_pattern, hankel_minors, power_sums, sturm_real_roots


@pytest.mark.parametrize("poly, disc", [
    ((-1, -1, 1), 5),
    ((-3, 0, 1), 12),
    ((1, -2, -1, 1), 49),
    ((-1, -3, 0, 1), 81),
    ((1, 1, -3, -1, 1), 725),
    ((4, 0, -6, 0, 1), 1600 * 16),  # Z[theta] has index 4
    ((-1, 3, 3, -4, -1, 1), 14641),
])
def test_discriminants(poly, disc):
    assert discriminant(poly) == disc


def test_power_sums_of_roots():
    # (x - 1)(x - 2)(x - 3)
    assert power_sums((-6, 11, -6, 1), 4) == [3, 6, 14, 36]


def test_hankel_signature_totally_real():
    # all leading minors positive for distinct real roots
    assert all(m > 0 for m in hankel_minors((1, 1, -3, -1, 1)))


@pytest.mark.parametrize("poly, n", [
    ((-1, -3, 0, 1), 3),
    ((1, 0, 1), 0),
    ((0, -1, 0, 1), 3),
    ((1, 0, -2, 0, 1), 2),  # (x^2 - 1)^2, distinct roots only
    ((5, 0, 5, 0, 1), 0),
])
def test_sturm(poly, n):
    assert sturm_real_roots(poly) == n


def test_factor_patterns():
    # x^2 - x - 1: 11 splits, 2 inert, 5 ramified
    assert factor_pattern((-1, -1, 1), 11) == [(1, 1), (1, 1)]
    assert factor_pattern((-1, -1, 1), 2) == [(2, 1)]
    assert factor_pattern((-1, -1, 1), 5) == [(1, 2)]
    # real quintic subfield of Q(zeta_11): 23 splits, 11 ramifies totally, 2 is inert
    f = (-1, 3, 3, -4, -1, 1)
    assert factor_pattern(f, 23) == [(1, 1)] * 5
    assert factor_pattern(f, 11) == [(1, 5)]
    assert factor_pattern(f, 2) == [(5, 1)]
    # x^4 - 1 mod 3 = (x-1)(x+1)(x^2+1)
    assert factor_pattern((-1, 0, 0, 0, 1), 3) == [(1, 1), (1, 1), (2, 1)]
    # p-th power part
    assert factor_pattern((1, 0, 0, 1), 3) == [(1, 3)]


def test_factor_pattern_rejects_vanishing_lead():
    with pytest.raises(ValueError):
        factor_pattern((1, 1, 3), 3)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(-6, 6), min_size=1, max_size=4), st.sampled_from([2, 3, 5, 7, 11, 13]))
def test_factor_degrees_add_up(coeffs, p):
    poly = tuple(coeffs) + (1,)
    pattern = factor_pattern(poly, p)
    assert sum(f * e for f, e in pattern) == len(coeffs)
    # a squarefree pattern mod p iff p does not divide the discriminant
    squarefree = all(e == 1 for _, e in pattern)
    assert squarefree == (discriminant(poly) % p != 0)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-9, 9), min_size=2, max_size=5, unique=True))
def test_discriminant_from_roots(roots):
    from math import prod

    poly = [1]
    for r in roots:  # multiply by (x - r)
        poly = [(poly[i - 1] if i > 0 else 0) - r * (poly[i] if i < len(poly) else 0) for i in range(len(poly) + 1)]
    want = prod((a - b) ** 2 for i, a in enumerate(roots) for b in roots[i + 1:])
    assert discriminant(poly) == want
    assert sturm_real_roots(poly) == len(roots)
