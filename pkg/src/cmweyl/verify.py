"""Acceptance checks, shared by ``cmweyl verify`` and the test suite.

Each check returns a :class:`CriterionResult`; nothing here raises on a failed
comparison, so one bad number never hides the others.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

# reference residues r_d(G) and proportions, degree -> group -> (residue, proportion)
REFERENCE = {
    2: {"2T1": (0.009856, None)},
    3: {"3T1": (2.29e-5, 0.69), "3T2": (1.01e-5, 0.31)},
    4: {
        "4T1": (2.41e-8, 0.19),
        "4T2": (1.56e-8, 0.13),
        "4T3": (5.9e-8, 0.48),
        "4T4": (9.3e-11, 0.0008),
        "4T5": (2.5e-8, 0.20),
    },
    5: {
        "5T1": (3.08e-11, 0.29),
        "5T2": (4.24e-13, 0.003),
        "5T3": (9e-15, 0.00009),
        "5T4": (5e-15, 0.00005),
        "5T5": (7.4e-11, 0.70),
    },
}
REFERENCE_TOTALS = {2: 0.009856, 3: 3.30e-5, 4: 1.24e-7, 5: 1.05e-10}
REFERENCE_COUNTS = {
    3: {"3T1": 107, "3T2": 24893},
    4: {"4T1": 75, "4T2": 289, "4T3": 8147, "4T4": 45, "4T5": 16444},
    5: {"5T1": 5, "5T2": 28, "5T3": 15, "5T4": 21, "5T5": 24931},
}
CM_DENSITY = 0.009856


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    details: list[str] = field(default_factory=list)
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] criterion {self.number}: {self.title} ({self.seconds:.1f}s)"


class _Checker:
    """Collects sub-checks for one criterion."""

    def __init__(self, number: int, title: str):
        self.result = CriterionResult(number, title, True)
        self._t0 = time.perf_counter()

    def check(self, ok: bool, message: str) -> bool:
        ok = bool(ok)
        self.result.details.append(f"{'ok ' if ok else 'BAD'} {message}")
        self.result.passed &= ok
        return ok

    def close(self, budget: float | None = None) -> CriterionResult:
        self.result.seconds = time.perf_counter() - self._t0
        if budget is not None:
            self.check(self.result.seconds < budget, f"runtime {self.result.seconds:.1f}s < {budget:.0f}s")
        return self.result


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


def criterion_1() -> CriterionResult:
    from .catalog import synthesize_quadratic
    from .residues import residue_partial_sum

    c = _Checker(1, "degree-2 residue from synthesized fields, D <= 100000")
    cat = synthesize_quadratic(100_000)
    rep = residue_partial_sum(cat)
    c.check(abs(rep.partial_sum - 0.009856) <= 5e-4,
            f"r_2(C2) = {rep.partial_sum:.6f}, target 0.009856 +- 0.0005 over {rep.n_fields} fields")
    return c.close(60)


def _table_checks(c: _Checker, degree: int, rel_tol: float, prop_tol: float) -> None:
    from .catalog import load_bundled
    from .residues import residue_table

    cat = load_bundled(degree)
    c.check(len(cat) > 0, f"bundled degree-{degree} catalog has {len(cat)} fields ({cat.source})")
    table = residue_table(cat)
    for group, (target, share) in REFERENCE[degree].items():
        try:
            rep = table.report(group)
        except KeyError:
            c.check(False, f"degree {degree}: no fields of {group}")
            continue
        c.check(_rel(rep.partial_sum, target) <= rel_tol,
                f"r_{degree}({group}) = {rep.partial_sum:.4g}, target {target:.3g} +- {rel_tol:.0%} "
                f"({rep.n_fields} fields, min disc {rep.min_disc})")
        if share is not None:
            c.check(abs(rep.proportion - share) <= prop_tol,
                    f"proportion {group} = {rep.proportion:.4f}, target {share} +- {prop_tol}")
    c.result.details.append(f"    total r_{degree} = {table.total:.4g} (reference {REFERENCE_TOTALS[degree]:.3g})")


def criterion_2() -> CriterionResult:
    from .catalog import load_bundled

    c = _Checker(2, "degree-3 residues and proportions from the bundled catalog")
    cat = load_bundled(3)
    n_c3 = len(cat.filter("3T1"))
    c.check(n_c3 == 107, f"{n_c3} cyclic cubic fields bundled, expected 107")
    _table_checks(c, 3, 0.05, 0.02)
    return c.close(120)


def criterion_3() -> CriterionResult:
    c = _Checker(3, "degree-4 and degree-5 residues and proportions from bundled snapshots")
    for degree in (4, 5):
        try:
            _table_checks(c, degree, 0.10, 0.03)
        except Exception as exc:  # missing data file etc.
            c.check(False, f"degree {degree}: {type(exc).__name__}: {exc}")
    return c.close()


def imaginary_fundamental_count(N: int) -> int:
    """Number of negative fundamental discriminants d with |d| <= N, by sieving."""
    sqf = np.ones(N + 1, dtype=bool)
    for k in range(2, math.isqrt(N) + 1):
        sqf[k * k :: k * k] = False
    n = np.arange(N + 1)
    odd = (n % 4 == 3) & sqf
    m = n // 4
    even = (n % 4 == 0) & np.isin(m % 4, (1, 2)) & sqf[m]
    return int(np.count_nonzero((odd | even) & (n >= 3)))


def criterion_4() -> CriterionResult:
    from .residues import rational_density

    c = _Checker(4, "degenerate degree-1 pipeline against 3/pi^2")
    target = 3 / math.pi**2
    val = rational_density()
    c.check(abs(val - target) <= 1e-6, f"field contribution of Q = {val:.12f}, 3/pi^2 = {target:.12f}")
    N = 10**6
    count = imaginary_fundamental_count(N)
    c.check(_rel(count / N, target) <= 0.01,
            f"{count} imaginary quadratic fundamental discriminants up to {N}: ratio {count / N:.6f}")
    return c.close()


def criterion_5() -> CriterionResult:
    from .exponents import ExponentInput, c2_c3

    c = _Checker(5, "exact exponent arithmetic")
    es = c2_c3([ExponentInput(5, "2/5", 1, "1/2")])
    want = {"C1": Fraction(3, 10), "alpha": Fraction(19, 25), "beta": Fraction(17, 20),
            "C2": Fraction(3, 20), "C3": Fraction(3, 20)}
    got = {"C1": es.C1, "alpha": es.alpha, "beta": es.beta, "C2": es.C2, "C3": es.C3}
    for k, v in want.items():
        c.check(got[k] == v and isinstance(got[k], Fraction), f"{k} = {got[k]}, expected {v}")
    es0 = c2_c3([ExponentInput(5, 0, 1, 0)])
    c.check(es0.C3 == Fraction(1, 2), f"C3(delta=0, M=1, delta'=0) = {es0.C3}, expected 1/2")
    return c.close()


def criterion_6() -> CriterionResult:
    from .permcore import (CMTypeMask, cm_type_orbit, is_abelian, labels_of_degree, min_index_and_a,
                           transitive_group, wreath_c2)

    c = _Checker(6, "wreath products over transitive groups of degree 2..5")
    for d in range(2, 6):
        for lab in labels_of_degree(d):
            G = transitive_group(lab)
            W = wreath_c2(G)
            masks = CMTypeMask.all_masks(d)
            orbits = {cm_type_orbit(W, m) for m in masks}
            ok = W.order() == 2**d * G.order() and not is_abelian(W) and orbits == {2**d}
            c.check(ok, f"{lab}: |W| = {W.order()} = 2^{d}*{G.order()}, abelian={is_abelian(W)}, "
                        f"orbit sizes {sorted(orbits)} over {len(masks)} types")
        _, a = min_index_and_a(transitive_group(labels_of_degree(d)[-1]))
        c.check(a == 1, f"a(S_{d}) = {a}")
    return c.close(30)


def criterion_7(X: int = 100_000) -> CriterionResult:
    from .cm_enum import count_report, enumerate_all

    c = _Checker(7, f"quartic CM enumeration up to {X}")
    records = enumerate_all(X)
    rep = count_report(X, records=records)
    c.check(_rel(rep.density, CM_DENSITY) <= 0.15,
            f"N^cm({X})/{X} = {rep.density:.6f} ({rep.n_cm} fields), target {CM_DENSITY} +- 15%")
    marks = [x for x in (1000, 10_000, 100_000) if x <= X]
    ratios = [(row[0], row[2] / row[1]) for row in count_report(X, marks, records).checkpoints]
    mono = all(a[1] < b[1] for a, b in zip(ratios, ratios[1:]))
    c.check(mono, "Weyl ratio increasing: " + ", ".join(f"{x}: {r:.3f}" for x, r in ratios))
    c.check(rep.slope_fit <= 0.6, f"growth exponent of N^notWeyl = {rep.slope_fit:.3f}, limit 0.6 "
                                  f"(dyadic checkpoints {[p[0] for p in rep.checkpoints]})")
    return c.close(600)


def criterion_8() -> CriterionResult:
    from .catalog import synthesize_quadratic
    from .cm_enum import SquareClassRep, classify_galois
    from .zeta import l_value, residue_zeta

    c = _Checker(8, "residue vs L(1, chi_D) for D <= 10^4, cyclotomic classification")
    cat = synthesize_quadratic(10_000)
    worst, bad = 0.0, []
    for rec in cat:
        L = l_value(rec.discriminant, 1)
        diff = abs(residue_zeta(rec) - L.value)
        worst = max(worst, diff)
        if diff > 1e-8 + L.tail_bound:
            bad.append(rec.discriminant)
    c.check(not bad, f"{len(cat)} discriminants, max |Res - L(1)| = {worst:.2e}, failures {bad[:5]}")
    z5 = classify_galois(SquareClassRep(5, -5, 1))
    z8 = classify_galois(SquareClassRep(8, -2, 0))
    c.check(z5 == "C4", f"Q(zeta_5) = Q(sqrt5)(sqrt((-5+sqrt5)/2)) classified {z5}")
    c.check(z8 == "V4", f"Q(zeta_8) = Q(sqrt8)(sqrt(-1)) classified {z8}")
    return c.close()


CRITERIA: dict[int, Callable[[], CriterionResult]] = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
}


def run_all(only: list[int] | None = None, echo: Callable[[str], None] | None = None,
            verbose: bool = True) -> list[CriterionResult]:
    results = []
    for n in sorted(only or CRITERIA):
        res = CRITERIA[n]()
        results.append(res)
        if echo:
            echo(res.line())
            if verbose:
                for d in res.details:
                    echo("    " + d)
    return results
