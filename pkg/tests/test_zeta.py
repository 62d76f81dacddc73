"""Dedekind zeta values checked against independently computed references.

Reference values come from PARI/GP 2.15 (``lfun``), computed once offline and
frozen here.
"""

from __future__ import annotations

import math
from dataclasses import replace
from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmweyl.catalog import FieldRecord, load_bundled
from cmweyl.errors import CmWeylError, PrecisionError
from cmweyl.polyutil import factor_pattern
from cmweyl.zeta import (
    ZETA2,
    character_values,
    euler_partial_products,
    frobenius_counts,
    index_primes,
    is_fundamental,
    kronecker,
    kronecker_array,
    l_value,
    l_values,
    local_factor,
    prime_bound_for,
    primes_up_to,
    residue_zeta,
    splitting_type,
    zeta_f_at_2,
    zeta_f_at_2_many,
)

L2_REF = {5: 0.706211403259741, 8: 0.872358024954860, 13: 0.842257153530716, 17: 1.12646149283744,
          21: 0.820466380902699, 229: 0.922765889182942, 1997: 0.695859181710532}
L1_REF = {5: 0.430408940964004, 8: 0.623225240140231, 13: 0.662735391071846, 17: 1.01608483384284,
          21: 0.683807247830964, 229: 1.07546851605294, 1997: 0.408286352011336,
          -3: 0.604599788078073, -4: 0.785398163397448, -23: 1.96520205410786, -1003: 0.396788793161166}
ZETA_REF = {
    "2.2.5.1": 1.1616711956186385497,
    "2.2.12.1": 1.5621990258332796845,
    "2.2.29.1": 1.2474768345571250434,
    "3.3.49.1": 1.0677653128699757734,
    "3.3.81.1": 1.1722471496117109428,
    "3.3.148.1": 1.4238865750458929573,
    "3.3.961.1": 2.40957760577432,
    "3.3.1304.1": 2.06887941255520,
    "4.4.725.1": 1.0369329880762382418,
    "4.4.1600.1": 1.10699528520823,
    "4.4.2000.1": 1.1315733524559441570,
    "4.4.2225.1": 1.15721466378463,
    "4.4.2304.1": 1.37276201042688,
    "4.4.3600.1": 1.12456663894170,
}
QUINTIC_11 = FieldRecord("5.5.14641.1", 5, 14641, (-1, 3, 3, -4, -1, 1), "5T1", 1, 1.635694125589697,
                         (5, 0))
QUINTIC_11_ZETA2 = 1.0252001241345418725


@lru_cache(maxsize=None)
def _bundled(d: int) -> dict[str, FieldRecord]:
    return {r.label: r for r in load_bundled(d)}


def _record(label: str) -> FieldRecord:
    return _bundled(int(label.split(".")[0]))[label]


@pytest.mark.parametrize("D", sorted(L2_REF))
def test_l2_theta_and_finite_agree_with_reference(D):
    # the references carry 15 significant digits
    theta = l_value(D, 2, tol=1e-12)
    finite = l_value(D, 2, method="finite")
    assert abs(theta.value - L2_REF[D]) <= theta.tail_bound + 1e-14
    assert abs(finite.value - L2_REF[D]) <= finite.tail_bound + 1e-14
    assert abs(theta.value - finite.value) <= theta.tail_bound + finite.tail_bound


def test_theta_precision_floor_reported():
    with pytest.raises(PrecisionError):
        l_value(1997, 2, tol=1e-15)


@pytest.mark.parametrize("D", sorted(L1_REF))
def test_l1_reference(D):
    v = l_value(D, 1)
    assert v.value == pytest.approx(L1_REF[D], abs=1e-13)
    assert isinstance(v.tail_bound, float)
    if D > 0:
        assert l_value(D, 1, tol=1e-12, method="theta").value == pytest.approx(L1_REF[D], abs=1e-12)


def test_l_values_batch_matches_scalar():
    Ds = [5, 8, 12, 13, 17, 1997]
    vals, errs = l_values(Ds, 2, tol=1e-12)
    for D, v in zip(Ds, vals):
        assert v == pytest.approx(l_value(D, 2, method="finite").value, abs=1e-12)
    assert np.all(errs <= 1e-12)


def test_l_value_errors():
    with pytest.raises(CmWeylError):
        l_value(12 * 4, 1)
    with pytest.raises(ValueError):
        l_value(5, 3)
    with pytest.raises(CmWeylError):
        l_value(1, 1)
    assert l_value(1, 2).value == ZETA2


@lru_cache(maxsize=None)
def _reference_zetas(d: int) -> dict:
    labels = [lab for lab in ZETA_REF if lab.startswith(f"{d}.")]
    vals = zeta_f_at_2_many([_record(lab) for lab in labels], tol=1e-6)
    return dict(zip(labels, vals))


@pytest.mark.parametrize("label", sorted(ZETA_REF))
def test_zeta_f_2_against_reference(label):
    z = _reference_zetas(int(label[0]))[label]
    assert z.tail_bound <= 1e-6
    assert abs(z.value - ZETA_REF[label]) <= z.tail_bound + 1e-12


def test_quintic_zeta():
    z = zeta_f_at_2(QUINTIC_11, tol=1e-3)
    assert abs(z.value - QUINTIC_11_ZETA2) <= z.tail_bound + 1e-12


def test_index_prime_without_override_is_bracketed():
    rec = _record("4.4.1600.1")
    assert index_primes(rec) == {2: 2}
    bare = replace(rec, local_factors={})
    with pytest.raises(PrecisionError):
        zeta_f_at_2(bare, tol=1e-6)
    z = zeta_f_at_2(bare, prime_bound=20_000)
    assert abs(z.value - ZETA_REF["4.4.1600.1"]) <= z.tail_bound
    assert z.tail_bound > zeta_f_at_2(rec, prime_bound=20_000).tail_bound


def test_batch_equals_single():
    cat = load_bundled(3).first(40)
    many = zeta_f_at_2_many(cat.records, tol=1e-3)
    for rec, z in zip(cat.records[:5], many):
        assert zeta_f_at_2(rec, tol=1e-3).value == z.value


def test_partial_products_approach_limit():
    rec = _record("3.3.49.1")
    vals = euler_partial_products(rec, [10, 1000, 100_000])
    errs = [abs(v - ZETA_REF["3.3.49.1"]) for v in vals]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-5


def test_prime_bound_cap():
    assert prime_bound_for(1e-2, 3) < prime_bound_for(1e-4, 3)
    with pytest.raises(PrecisionError):
        prime_bound_for(1e-12, 5)


def test_splitting_and_local_factor():
    st_ = splitting_type((-1, -1, 1), 5)
    assert st_.ramified and st_.degrees == (1,) and st_.exponents == (2,)
    assert splitting_type((4, 0, -6, 0, 1), 2, index=4).index_divisor
    assert local_factor([1, 1], 3) == pytest.approx(1 / (1 - 1 / 9) ** 2)
    assert local_factor([2], 3) == pytest.approx(1 / (1 - 1 / 81))


def test_residue_class_number_formula():
    # Q(sqrt 5): h = 1, R = log golden ratio
    rec = FieldRecord("2.2.5.1", 2, 5, (-1, -1, 1), "2T1", 1, math.log((1 + 5**0.5) / 2), (2, 0))
    assert residue_zeta(rec) == pytest.approx(L1_REF[5], abs=1e-14)
    with pytest.raises(CmWeylError):
        residue_zeta(replace(rec, class_number=None))


def test_fundamental_discriminants_small():
    assert [D for D in range(-20, 30) if is_fundamental(D)] == [
        -20, -19, -15, -11, -8, -7, -4, -3, 5, 8, 12, 13, 17, 21, 24, 28, 29]


@settings(max_examples=100, deadline=None)
@given(st.integers(-3000, 3000).filter(lambda D: D not in (0, 1) and is_fundamental(D)))
def test_kronecker_paths_agree(D):
    n = np.arange(1, 400)
    a = kronecker_array(D, n)
    assert list(a) == [kronecker(D, int(k)) for k in n]
    assert list(character_values(D, 399)[1:]) == list(a)
    # a primitive character mod |D|
    assert list(character_values(D, 2 * abs(D))[1:abs(D) + 1]) == list(character_values(D, 2 * abs(D))[abs(D) + 1:])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=3, max_size=5))
def test_frobenius_counts_match_factorisation(coeffs):
    d = len(coeffs)
    poly = tuple(coeffs) + (1,)
    ps = [int(p) for p in primes_up_to(400) if p > d]
    keep = [p for p in ps if all(e == 1 for _, e in factor_pattern(poly, p))]
    if not keep:
        return
    p = np.array(keep, dtype=np.int64)
    cm = np.array([[c % q for c in coeffs] for q in keep], dtype=np.int64)
    n1, n2, rest = frobenius_counts(cm, p)
    for q, a, b, r in zip(keep, n1, n2, rest):
        degs = sorted(f for f, _ in factor_pattern(poly, q))
        want1 = degs.count(1)
        want2 = degs.count(2)
        assert (a, b) == (want1, want2), q
        assert r == d - want1 - 2 * want2
