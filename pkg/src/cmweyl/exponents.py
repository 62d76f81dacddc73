"""Exact rational exponents for CM-field counting error terms, plus the bound tables.

Every value is a ``fractions.Fraction``; nothing here rounds.  The epsilon
that accompanies each exponent is left to the caller.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import CmWeylError, HypothesisError

HALF = Fraction(1, 2)


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse "p/q", an integer, or a finite decimal string exactly."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {text!r}") from exc


@dataclass(frozen=True)
class ExponentInput:
    d: int
    delta_d: Fraction
    M_G: Fraction
    delta_prime: Fraction
    group: str = ""

    def __post_init__(self) -> None:
        for name in ("delta_d", "M_G", "delta_prime"):
            object.__setattr__(self, name, parse_rational(getattr(self, name)))
        if self.d < 1:
            raise ValueError("degree must be positive")
        if not 0 <= self.delta_d <= HALF:
            raise ValueError(f"delta_d={self.delta_d} outside [0, 1/2]")
        if not 0 <= self.delta_prime <= HALF:
            raise ValueError(f"delta_prime={self.delta_prime} outside [0, 1/2]")
        if self.M_G <= 0:
            raise ValueError(f"M_G={self.M_G} must be positive")

    @property
    def hypothesis_ok(self) -> bool:
        return self.delta_d + self.M_G < 2

    def require(self) -> None:
        if not self.hypothesis_ok:
            tag = f" for {self.group}" if self.group else ""
            raise HypothesisError(
                f"delta_d + M(G) = {self.delta_d + self.M_G} is not < 2{tag}"
            )


def c1(inp: ExponentInput) -> Fraction:
    inp.require()
    s = inp.delta_d + inp.M_G
    return HALF if s <= 1 else 1 - s / 2


def alpha(inp: ExponentInput) -> Fraction:
    inp.require()
    first = (inp.delta_d + inp.delta_prime + inp.M_G) / (inp.delta_prime + 2)
    return max(first, inp.M_G / 2)


def beta_from_alpha(d: int, a: Fraction, delta_prime: Fraction) -> Fraction:
    return 1 - (1 - a) / (1 + d * delta_prime * (1 - a))


def beta(inp: ExponentInput) -> Fraction:
    """Per-group beta(delta_d, M(G), delta')."""
    return beta_from_alpha(inp.d, alpha(inp), inp.delta_prime)


def beta_max(inputs: Sequence[ExponentInput]) -> Fraction:
    """Degree-wide beta(delta_d, delta') = max over the supplied groups."""
    if not inputs:
        raise ValueError("no groups supplied")
    return max(beta(i) for i in inputs)


@dataclass
class ExponentSet:
    d: int
    delta_d: Fraction
    delta_prime: Fraction
    per_group: dict[str, dict[str, Fraction]]
    beta_max: Fraction
    C3: Fraction
    provenance: dict[str, str] = field(default_factory=dict)

    def first(self) -> dict[str, Fraction]:
        return next(iter(self.per_group.values()))

    @property
    def C1(self) -> Fraction:
        return min(g["C1"] for g in self.per_group.values())

    @property
    def alpha(self) -> Fraction:
        return max(g["alpha"] for g in self.per_group.values())

    @property
    def beta(self) -> Fraction:
        return self.beta_max

    @property
    def C2(self) -> Fraction:
        return min(g["C2"] for g in self.per_group.values())

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "delta_d": str(self.delta_d),
            "delta_prime": str(self.delta_prime),
            "groups": {
                name: {k: str(v) for k, v in vals.items()} for name, vals in self.per_group.items()
            },
            "C1": str(self.C1),
            "alpha": str(self.alpha),
            "beta": str(self.beta_max),
            "C2": str(self.C2),
            "C3": str(self.C3),
            "provenance": dict(self.provenance),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExponentSet":
        groups = {
            name: {k: Fraction(v) for k, v in vals.items()} for name, vals in data["groups"].items()
        }
        return cls(
            d=int(data["d"]),
            delta_d=Fraction(data["delta_d"]),
            delta_prime=Fraction(data["delta_prime"]),
            per_group=groups,
            beta_max=Fraction(data["beta"]),
            C3=Fraction(data["C3"]),
            provenance=dict(data.get("provenance", {})),
        )


def c2_c3(inputs: Iterable[ExponentInput]) -> ExponentSet:
    """C2 per group uses the degree-wide beta; C3 is the minimum of C2."""
    inputs = list(inputs)
    if not inputs:
        raise ValueError("no groups supplied")
    bad = [i for i in inputs if not i.hypothesis_ok]
    if bad:
        names = ", ".join(i.group or f"M={i.M_G}" for i in bad)
        raise HypothesisError(f"delta_d + M(G) >= 2 for: {names}")
    d = inputs[0].d
    dd, dp = inputs[0].delta_d, inputs[0].delta_prime
    if any(i.d != d or i.delta_d != dd or i.delta_prime != dp for i in inputs):
        raise ValueError("all inputs must share d, delta_d and delta_prime")
    bmax = beta_max(inputs)
    per_group: dict[str, dict[str, Fraction]] = {}
    for k, inp in enumerate(inputs):
        name = inp.group or f"G{k + 1}"
        if name in per_group:
            name = f"{name}#{k + 1}"
        a = alpha(inp)
        b = beta_from_alpha(d, a, dp)
        per_group[name] = {
            "M": inp.M_G,
            "C1": c1(inp),
            "alpha": a,
            "beta": b,
            "C2": min(c1(inp), 1 - bmax),
        }
    C3 = min(g["C2"] for g in per_group.values())
    prov = {
        "C2": "min(C1(delta_d, M(G)), 1 - beta(delta_d, delta')) with the max-over-groups beta",
        "beta": f"max over {len(inputs)} group(s) of the per-group beta",
    }
    return ExponentSet(d, dd, dp, per_group, bmax, C3, prov)


# bound tables ------------------------------------------------------------


@dataclass(frozen=True)
class GroupInfo:
    label: str
    name: str
    order: int
    abelian: bool
    dihedral_prime: int = 0  # l when the group is D_l acting on l points
    s3_times: int = 0  # |A| when G = S3 x A in degree 3|A|
    s4_times: int = 0  # |A| when G = S4 x A in degree 4|A|


@dataclass(frozen=True)
class TableEntry:
    M_G: Fraction
    source: str
    delta_range: Fraction | None = None  # strict upper bound on delta_d when present

    def as_tuple(self) -> tuple[Fraction, str, Fraction | None]:
        return self.M_G, self.source, self.delta_range


def _small_groups() -> dict[str, GroupInfo]:
    from .permcore import TRANSITIVE, TRANSITIVE_ORDERS, is_abelian, transitive_group

    out = {}
    dihedral = {"3T2": 3, "5T2": 5}
    for lab, (name, _) in TRANSITIVE.items():
        if lab == "1T1":
            continue
        G = transitive_group(lab)
        out[lab] = GroupInfo(lab, name, TRANSITIVE_ORDERS[lab], is_abelian(G), dihedral.get(lab, 0))
    return out


_LARGER = {
    "6T1": GroupInfo("6T1", "C6", 6, True),
    "6T2": GroupInfo("6T2", "S3", 6, False),
    "6T3": GroupInfo("6T3", "D6", 12, False, s3_times=2),
    "6T5": GroupInfo("6T5", "F18", 18, False),
    "6T12": GroupInfo("6T12", "A5", 60, False),
    "6T14": GroupInfo("6T14", "S5", 120, False),
    "6T15": GroupInfo("6T15", "A6", 360, False),
    "7T1": GroupInfo("7T1", "C7", 7, True),
    "7T2": GroupInfo("7T2", "D7", 14, False, dihedral_prime=7),
    "7T3": GroupInfo("7T3", "F21", 21, False),
    "7T5": GroupInfo("7T5", "PSL2(7)", 168, False),
    "8T1": GroupInfo("8T1", "C8", 8, True),
    "8T2": GroupInfo("8T2", "C4xC2", 8, True),
    "8T3": GroupInfo("8T3", "C2^3", 8, True),
    "8T4": GroupInfo("8T4", "D4", 8, False),
    "8T5": GroupInfo("8T5", "Q8", 8, False),
    "8T25": GroupInfo("8T25", "F56", 56, False),
}

# rows with M(G) + (delta bound) = 2
_DELTA_ROWS = {
    "6T5": (Fraction(7, 4), Fraction(1, 4)),
    "6T12": (Fraction(8, 5), Fraction(2, 5)),
    "6T14": (Fraction(19, 10), Fraction(1, 10)),
    "6T15": (Fraction(19, 10), Fraction(1, 10)),
    "7T2": (Fraction(19, 12), Fraction(5, 12)),
    "7T3": (Fraction(7, 4), Fraction(1, 4)),
    "7T5": (Fraction(11, 6), Fraction(1, 6)),
    "8T25": (Fraction(27, 14), Fraction(1, 14)),
}

_GROUPS: dict[str, GroupInfo] | None = None


def group_info(d: int, label: str) -> GroupInfo:
    global _GROUPS
    if _GROUPS is None:
        _GROUPS = {**_small_groups(), **_LARGER}
    key = label
    if key not in _GROUPS:
        matches = [g for g in _GROUPS.values() if g.name.upper() == label.upper() and g.label.startswith(f"{d}T")]
        if len(matches) != 1:
            raise CmWeylError(f"unknown pair (d={d}, G={label})")
        key = matches[0].label
    info = _GROUPS[key]
    if not info.label.startswith(f"{d}T"):
        raise CmWeylError(f"label {info.label} is not of degree {d}")
    return info


def _smallest_prime(n: int) -> int:
    p = 2
    while p * p <= n:
        if n % p == 0:
            return p
        p += 1
    return n


def _is_prime_power(n: int) -> bool:
    p = _smallest_prime(n)
    while n % p == 0:
        n //= p
    return n == 1


def table_entries(d: int, label: str) -> list[TableEntry]:
    """Every encoded bound N_d(X, G) << X^M that applies to (d, G)."""
    g = group_info(d, label)
    rows: list[TableEntry] = []
    if g.abelian:
        ell = _smallest_prime(g.order)
        rows.append(TableEntry(1 / (g.order * (1 - Fraction(1, ell))), "abelian G [Mak85]"))
    if g.dihedral_prime and g.dihedral_prime == d:
        ell = d
        rows.append(TableEntry(Fraction(3, ell - 1) - Fraction(1, ell * (ell - 1)), "d = l prime, G = D_l [Klu06, CT17]"))
    if _is_prime_power(g.order):
        rows.append(TableEntry(Fraction(1), "G a p-group [KM04]"))
    if d >= 5 and g.order == d:
        rows.append(TableEntry(Fraction(3, 8), "d >= 5, |G| = d [EV06]"))
    if d == 3:
        rows.append(TableEntry(Fraction(1), "d = 3, any transitive G [DH71]"))
    elif d == 4:
        rows.append(TableEntry(Fraction(1), "d = 4, any transitive G [CDO02, Bha05]"))
    elif d == 5:
        rows.append(TableEntry(Fraction(1), "d = 5, any transitive G [Bha10]"))
    if g.s3_times and d == 3 * g.s3_times:
        rows.append(TableEntry(Fraction(1, g.s3_times), "d = 3|A|, G = S3 x A [Wan17]"))
    if g.s4_times and d == 4 * g.s4_times:
        rows.append(TableEntry(Fraction(1, g.s4_times), "d = 4|A|, G = S4 x A [Wan17]"))
    if g.label in _DELTA_ROWS:
        M, bound = _DELTA_ROWS[g.label]
        rows.append(TableEntry(M, f"{g.label} ({g.name}) with delta_{d} < {bound}", bound))
    if not rows:
        raise CmWeylError(f"no encoded bound for (d={d}, G={label})")
    return rows


def table_lookup(d: int, label: str) -> tuple[Fraction, str, Fraction | None]:
    """The strongest (smallest M) encoded bound for (d, G)."""
    rows = table_entries(d, label)
    return min(rows, key=lambda r: r.M_G).as_tuple()


# best known 2-torsion exponents
def known_delta(d: int) -> Fraction | None:
    if d == 2:
        return Fraction(0)
    if d in (3, 4):
        return Fraction(2784, 10000)
    if d >= 5:
        return HALF - Fraction(1, 2 * d)
    return None
