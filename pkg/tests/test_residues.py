from __future__ import annotations

import math
from functools import lru_cache

import pytest

from cmweyl.catalog import Catalog, load_bundled, synthesize_quadratic
from cmweyl.errors import CatalogError, CmWeylError
from cmweyl.residues import (
    ResidueReport,
    ResidueTable,
    field_contribution,
    field_contributions,
    proportions,
    rational_density,
    residue_partial_sum,
    residue_table,
    tail_fit,
)


@lru_cache(maxsize=None)
def _cubic_table() -> ResidueTable:
    return residue_table(load_bundled(3).first(300))


@lru_cache(maxsize=None)
def _quadratic_table() -> ResidueTable:
    return residue_table(synthesize_quadratic(2000))


def test_rational_density():
    assert rational_density() == pytest.approx(3 / math.pi**2, abs=1e-12)


def test_single_quadratic_contribution():
    rec = synthesize_quadratic(5).records[0]
    # Res = 2 log(phi)/sqrt 5 and zeta_F(2) = zeta(2) L(2, chi_5)
    res = 2 * math.log((1 + 5**0.5) / 2) / 5**0.5
    want = res / (4 * 25 * (math.pi**2 / 6) * 0.706211403259741)
    assert field_contribution(rec) == pytest.approx(want, rel=1e-12)


def test_quadratic_sum_with_tail_reaches_reference():
    t = _quadratic_table()
    rep = t.reports[0]
    assert t.total == pytest.approx(0.009827088953, rel=1e-9)
    assert rep.partial_sum + rep.tail_estimate == pytest.approx(0.009856, abs=5e-6)
    assert rep.error_bound < 1e-12


def test_small_cubic_table():
    t = _cubic_table()
    c3 = t.report("C3")
    s3 = t.report("S3")
    assert (c3.n_fields, c3.min_disc) == (13, 49)
    assert (s3.n_fields, s3.min_disc) == (287, 148)
    assert c3.partial_sum == pytest.approx(2.2862e-5, rel=1e-3)
    assert c3.proportion + s3.proportion == pytest.approx(1.0)
    assert c3.error_bound < 0.005 * c3.partial_sum
    assert t.total == pytest.approx(c3.partial_sum + s3.partial_sum)


def test_table_rows_and_round_trip():
    t = _cubic_table()
    rows = t.rows()
    assert [r["group"] for r in rows] == ["all", "3T1", "3T2"]
    assert list(rows[0]) == ["group", "n_fields", "min_disc", "residue", "proportion"]
    again = ResidueTable.from_dict(t.to_dict())
    assert again.rows() == rows
    rep = t.reports[0]
    assert ResidueReport.from_dict(rep.to_dict()) == rep
    with pytest.raises(KeyError):
        residue_table(load_bundled(3).filter("C3").first(5)).report("S3")


def test_partial_sums_monotone():
    sums = _cubic_table().report("S3").partial_sums()
    assert all(b > a for a, b in zip(sums, sums[1:]))
    assert sums[-1] == pytest.approx(_cubic_table().report("S3").partial_sum)


def test_mixed_groups_rejected():
    with pytest.raises(CmWeylError, match="mixes"):
        residue_partial_sum(load_bundled(3).first(20))
    with pytest.raises(CatalogError):
        residue_table(Catalog([], "empty", 3))
    assert field_contributions([]) == []


def test_proportions_validation():
    t = _cubic_table()
    shares = dict(proportions(t.reports))
    assert math.fsum(shares.values()) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(CmWeylError):
        proportions([t.reports[0], t.reports[0]])
    with pytest.raises(CmWeylError):
        proportions([t.reports[0], _quadratic_table().reports[0]])


def test_tail_fit_recovers_power_law():
    # N(T) = T^(1/2) exactly, constant weight 1
    discs = [k * k for k in range(1, 2001)]
    a, c, tail = tail_fit(discs, [1.0] * len(discs))
    assert a == pytest.approx(0.5, abs=1e-3)
    assert c == pytest.approx(1.0, rel=1e-2)
    # sum over k > 2000 of 1/k^4 ~ 1/(3 * 2000^3)
    assert tail == pytest.approx(1 / (3 * 2000**3), rel=2e-2)
    assert math.isnan(tail_fit([1, 2, 3], [1, 1, 1])[0])
