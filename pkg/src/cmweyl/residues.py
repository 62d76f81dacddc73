"""Partial sums of r_d(G) = sum_F Res zeta_F / (2^d d_F^2 zeta_F(2)) and group proportions."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .catalog import Catalog, FieldRecord
from .errors import CatalogError, CmWeylError
from .zeta import ZETA2, residue_zeta, zeta_f_at_2_many

# default absolute tolerance on zeta_F(2) per degree; the bound is rigorous and
# far from tight, so these keep each contribution well inside 0.5%
DEFAULT_TOLS = {1: 1e-12, 2: 1e-10, 3: 4e-3, 4: 8e-3, 5: 1.5e-2}


def default_tol(d: int) -> float:
    return DEFAULT_TOLS.get(d, 2e-2)


@dataclass
class Contribution:
    label: str
    disc: int
    value: float
    error: float


def field_contributions(records: Sequence[FieldRecord], tol: float | None = None) -> list[Contribution]:
    records = list(records)
    if not records:
        return []
    d = records[0].degree
    tol = default_tol(d) if tol is None else tol
    zetas = zeta_f_at_2_many(records, tol)
    out = []
    for rec, z in zip(records, zetas):
        res = residue_zeta(rec)
        val = res / (2**d * z.value * rec.discriminant**2)
        # z in [value - tail, value + tail]
        err = val * z.tail_bound / max(z.value - z.tail_bound, 1e-300)
        out.append(Contribution(rec.label, rec.discriminant, val, err))
    return out


def field_contribution(record: FieldRecord, tol: float | None = None) -> float:
    """R_d(F)/d_F^2 for one field."""
    return field_contributions([record], tol)[0].value


@dataclass
class ResidueReport:
    degree: int
    group: str
    n_fields: int
    partial_sum: float
    tail_estimate: float
    per_field: list[tuple[str, int, float]]
    proportion: float | None = None
    min_disc: int | None = None
    max_disc: int | None = None
    error_bound: float = 0.0
    source: str = ""

    def to_dict(self) -> dict:
        data = asdict(self)
        data["per_field"] = [list(t) for t in self.per_field]
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "ResidueReport":
        data = dict(data)
        data["per_field"] = [(str(a), int(b), float(c)) for a, b, c in data["per_field"]]
        return cls(**data)

    def partial_sums(self) -> list[float]:
        """Running sums in discriminant order."""
        out, acc = [], []
        for _, _, c in self.per_field:
            acc.append(c)
            out.append(math.fsum(acc))
        return out


def tail_fit(discs: Sequence[int], weights: Sequence[float]) -> tuple[float, float, float]:
    """Fit N(T) ~ c T^a on the upper half of the catalog.

    ``weights`` are contribution * d_F^2.  Returns (a, c, tail) where tail is
    the integral of the mean weight times dN(t)/t^2 beyond the largest disc.
    """
    n = len(discs)
    if n < 8:
        return float("nan"), float("nan"), 0.0
    lo = n // 2
    x = np.log(np.asarray(discs[lo:], dtype=float))
    y = np.log(np.arange(lo + 1, n + 1, dtype=float))
    a, logc = np.polyfit(x, y, 1)
    c = math.exp(logc)
    w = float(np.mean(weights[lo:]))
    T = float(discs[-1])
    if a >= 2:
        return float(a), c, float("inf")
    tail = w * c * a * T ** (a - 2) / (2 - a)
    return float(a), c, float(tail)


def residue_partial_sum(catalog: Catalog, tol: float | None = None) -> ResidueReport:
    groups = {r.galois_label for r in catalog}
    if len(groups) > 1:
        raise CmWeylError(f"catalog mixes groups {sorted(groups)}; filter by group first")
    if not catalog.records:
        raise CatalogError("empty catalog")
    contribs = field_contributions(catalog.records, tol)
    values = [c.value for c in contribs]
    discs = [c.disc for c in contribs]
    a, c, tail = tail_fit(discs, [v * D * D for v, D in zip(values, discs)])
    return ResidueReport(
        degree=catalog.degree,
        group=next(iter(groups)),
        n_fields=len(contribs),
        partial_sum=math.fsum(values),
        tail_estimate=tail,
        per_field=[(x.label, x.disc, x.value) for x in contribs],
        min_disc=discs[0],
        max_disc=discs[-1],
        error_bound=math.fsum(x.error for x in contribs),
        source=catalog.source,
    )


def proportions(reports: Sequence[ResidueReport]) -> list[tuple[str, float]]:
    names = [r.group for r in reports]
    if len(set(names)) != len(names):
        raise CmWeylError("duplicate group in proportions")
    if len({r.degree for r in reports}) > 1:
        raise CmWeylError("reports span several degrees")
    total = math.fsum(r.partial_sum for r in reports)
    return [(r.group, r.partial_sum / total) for r in reports]


@dataclass
class ResidueTable:
    degree: int
    reports: list[ResidueReport]
    total: float
    n_fields: int
    min_disc: int
    source: str = ""
    extra: dict = field(default_factory=dict)

    def rows(self) -> list[dict]:
        out = [{
            "group": "all",
            "n_fields": self.n_fields,
            "min_disc": self.min_disc,
            "residue": self.total,
            "proportion": None,
        }]
        for r in self.reports:
            out.append({
                "group": r.group,
                "n_fields": r.n_fields,
                "min_disc": r.min_disc,
                "residue": r.partial_sum,
                "proportion": r.proportion,
            })
        return out

    def report(self, group: str) -> ResidueReport:
        from .permcore import resolve_label

        lab = resolve_label(group, self.degree)
        for r in self.reports:
            if r.group == lab:
                return r
        raise KeyError(group)

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "total": self.total,
            "n_fields": self.n_fields,
            "min_disc": self.min_disc,
            "source": self.source,
            "reports": [r.to_dict() for r in self.reports],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ResidueTable":
        return cls(
            degree=int(data["degree"]),
            reports=[ResidueReport.from_dict(r) for r in data["reports"]],
            total=float(data["total"]),
            n_fields=int(data["n_fields"]),
            min_disc=int(data["min_disc"]),
            source=data.get("source", ""),
        )


def residue_table(catalog: Catalog, tol: float | None = None) -> ResidueTable:
    """One report per Galois group in the catalog plus the degree-wide total."""
    if not catalog.records:
        raise CatalogError("empty catalog")
    reports = [residue_partial_sum(catalog.filter(g), tol) for g in catalog.groups()]
    for (g, share), rep in zip(proportions(reports), reports):
        rep.proportion = share
    return ResidueTable(
        degree=catalog.degree,
        reports=reports,
        total=math.fsum(r.partial_sum for r in reports),
        n_fields=len(catalog),
        min_disc=catalog.records[0].discriminant,
        source=catalog.source,
    )


def rational_density() -> float:
    """The d = 1 pipeline: 1 / (2 zeta(2)) = 3 / pi^2."""
    from .catalog import rational_field

    return field_contribution(rational_field())


__all__ = [
    "ResidueReport",
    "ResidueTable",
    "field_contribution",
    "field_contributions",
    "proportions",
    "rational_density",
    "residue_partial_sum",
    "residue_table",
    "tail_fit",
    "ZETA2",
]
