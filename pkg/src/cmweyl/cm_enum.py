"""Quartic CM fields E = F(sqrt(alpha)) over real quadratic F = Q(sqrt D), by brute force.

Integral elements of F are stored as integer pairs (x, y) meaning (x + y sqrt D)/2
with x = yD (mod 2).  Extensions are counted as extensions of F: a non-normal
(D4) quartic field arises from alpha and from its conjugate alpha', which give
two distinct extensions of F inside an algebraic closure.  This is the count whose
Dirichlet series is sum_F D^-_{F,C2}(s) / d_F^{2s}.

Completeness of the search: write alpha O_F = a b^2 with a squarefree.  Every
prime dividing a ramifies in E, so N(a) <= N(disc(E/F)) <= X / D^2.  Minimising
the positive definite form Tr(-alpha g^2) over g in b^-1 (a lattice of
covolume sqrt(D)/N(b)) with the Hermite constant 2/sqrt(3) gives an integral
representative of the square class with -Tr(alpha) <= 2 sqrt(X / (3 D)).
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import EnumerationError
from .zeta import factor_int, is_fundamental, kronecker

GALOIS_TYPES = ("C4", "V4", "D4")


def _is_rational_square(q: Fraction) -> bool:
    if q < 0:
        return False
    n, d = q.numerator, q.denominator
    return math.isqrt(n) ** 2 == n and math.isqrt(d) ** 2 == d


def is_square_in_F(beta: tuple, D: int) -> bool:
    """Is x + y sqrt(D) (x, y rational) a square in Q(sqrt D)?"""
    x, y = Fraction(beta[0]), Fraction(beta[1])
    if x == 0 and y == 0:
        raise ValueError("beta must be non-zero")
    norm = x * x - D * y * y
    if not _is_rational_square(norm):
        return False
    n = Fraction(math.isqrt(norm.numerator), math.isqrt(norm.denominator))
    for s in (1, -1):
        t1 = (x + s * n) / 2
        t2 = (x - s * n) / 2
        if _is_rational_square(t1) and _is_rational_square(t2 / D):
            return True
    return False


@dataclass(frozen=True)
class SquareClassRep:
    base_D: int
    x: int
    y: int

    @property
    def a(self) -> Fraction:
        return Fraction(self.x, 2)

    @property
    def b(self) -> Fraction:
        return Fraction(self.y, 2)

    @property
    def alpha(self) -> tuple[Fraction, Fraction]:
        return self.a, self.b

    @property
    def norm(self) -> Fraction:
        return Fraction(self.x * self.x - self.base_D * self.y * self.y, 4)

    @property
    def totally_negative(self) -> bool:
        return self.x < 0 and self.x * self.x > self.base_D * self.y * self.y

    def conjugate(self) -> "SquareClassRep":
        return SquareClassRep(self.base_D, self.x, -self.y)

    def __str__(self) -> str:
        return f"({self.x}{'+' if self.y >= 0 else '-'}{abs(self.y)}*sqrt({self.base_D}))/2"


@dataclass(frozen=True)
class CMFieldRecord:
    base_D: int
    square_class: SquareClassRep
    abs_disc: int
    rel_norm: int
    galois_type: str

    @property
    def weyl(self) -> bool:
        return self.galois_type == "D4"

    def min_poly(self) -> tuple[int, ...]:
        """t^4 - Tr(alpha) t^2 + N(alpha), low to high."""
        s = self.square_class
        n = s.norm
        assert n.denominator == 1
        return (int(n), 0, -s.x, 0, 1)

    def to_dict(self) -> dict:
        return {
            "base_D": self.base_D,
            "x": self.square_class.x,
            "y": self.square_class.y,
            "abs_disc": self.abs_disc,
            "rel_norm": self.rel_norm,
            "galois_type": self.galois_type,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CMFieldRecord":
        sq = SquareClassRep(int(data["base_D"]), int(data["x"]), int(data["y"]))
        return cls(int(data["base_D"]), sq, int(data["abs_disc"]), int(data["rel_norm"]), data["galois_type"])


# relative discriminants -------------------------------------------------------------


def _v(n: int, p: int) -> int:
    if n == 0:
        return 10**9
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def _sqrt_mod_prime_power(D: int, p: int, k: int) -> int:
    """r with r^2 = D mod p^k for odd p not dividing D (D a QR mod p)."""
    r = next(t for t in range(1, p) if (t * t - D) % p == 0)
    mod = p
    for _ in range(1, k):
        mod *= p
        # Newton step
        r = (r - (r * r - D) * pow(2 * r, -1, mod)) % mod
    return r % (p**k)


def _sqrt_mod_2k(D: int, k: int) -> int:
    """Odd r with r^2 = D mod 2^k, for D = 1 mod 8."""
    r = 1
    for j in range(4, k + 1):
        if (r * r - D) % (2**j):
            r += 2 ** (j - 2)
    return r % (2**k)


def _odd_part(D: int, x: int, y: int, norm: int) -> int:
    out = 1
    for p, e in factor_int(norm).items():
        if p == 2:
            continue
        chi = kronecker(D, p)
        if chi == 0:
            if e % 2:
                out *= p
        elif chi == -1:
            v = min(_v(x, p), _v(y, p))
            if v % 2:
                out *= p * p
        else:
            r = _sqrt_mod_prime_power(D % p**(e + 1), p, e + 1)
            v1 = min(_v((x + y * r) % p ** (e + 1), p), e)
            v2 = e - v1
            if v1 % 2:
                out *= p
            if v2 % 2:
                out *= p
    return out


def _squares_mod4_inert(D: int) -> set[tuple[int, int]]:
    c = (D - 1) // 4
    out = set()
    for a in range(4):
        for b in range(4):
            # (a + b w)^2 with w^2 = w + c
            out.add(((a * a + b * b * c) % 4, (2 * a * b + b * b) % 4))
    return out


def _two_part(D: int, x: int, y: int, norm: int) -> int:
    r8 = D % 8
    if r8 == 1:
        K = _v(norm, 2) + 6
        r = _sqrt_mod_2k(D, K + 2)
        out = 1
        for s in (r, -r):
            a = ((x + y * s) // 2) if (x + y * s) % 2 == 0 else None
            if a is None:
                raise EnumerationError("non-integral element")
            a %= 2**K
            v = _v(a, 2)
            if v % 2:
                out *= 2**3
            else:
                u = (a >> v) % 4
                if u == 3:
                    out *= 2**2
        return out
    if r8 == 5:
        # alpha = A + B w, w = (1 + sqrt D)/2
        A, B = (x - y) // 2, y
        v = min(_v(A, 2), _v(B, 2))
        if v % 2:
            return 4**3
        A >>= v
        B >>= v
        if (A % 4, B % 4) in _squares_mod4_inert(D):
            return 1
        return 4**2
    # D = 4m, O = Z[sqrt m], alpha = A + B sqrt m
    m = D // 4
    A, B = x // 2, y
    v = _v(A * A - m * B * B, 2)
    if v % 2:
        return 2**5
    k = v // 2
    A >>= k
    B >>= k
    if k % 2:
        # multiply by a unit c with 2 = c^-1 pi^2, up to squares
        if m % 4 == 2:
            A, B = A * (m // 2), B * (m // 2)
        else:
            g0 = (1 + m) // 2
            ng = g0 * g0 - m
            A, B = (A * g0 - B * m) * ng, (B * g0 - A) * ng
    best = 1
    for a in range(4):
        for b in range(4):
            da = A - (a * a + m * b * b)
            db = B - 2 * a * b
            t = _v(da * da - m * db * db, 2)
            best = max(best, min(t, 4))
    if best >= 4:
        return 1
    t = 3 if best >= 3 else 1
    return 2 ** (5 - t)


def relative_discriminant_norm(D: int, x: int, y: int) -> int:
    """N(disc(E/F)) for E = F(sqrt alpha), alpha = (x + y sqrt D)/2 integral."""
    if (x - y * D) % 2:
        raise EnumerationError("(x + y sqrt D)/2 is not integral")
    n4 = x * x - D * y * y
    if n4 == 0 or n4 % 4:
        raise EnumerationError("degenerate element")
    norm = abs(n4 // 4)
    return _odd_part(D, x, y, norm) * _two_part(D, x, y, norm)


def classify_galois(rec: CMFieldRecord | SquareClassRep) -> str:
    sq = rec.square_class if isinstance(rec, CMFieldRecord) else rec
    if not sq.totally_negative:
        raise EnumerationError("alpha must be totally negative")
    n = sq.norm
    if _is_rational_square(n):
        return "V4"
    if _is_rational_square(n / sq.base_D):
        return "C4"
    return "D4"


# enumeration -------------------------------------------------------------------------


def trace_bound(D: int, X: int) -> int:
    return math.isqrt(4 * X // (3 * D)) + 1


def _product(D: int, p: tuple[int, int], q: tuple[int, int]) -> tuple[Fraction, Fraction]:
    (x1, y1), (x2, y2) = p, q
    return Fraction(x1 * x2 + D * y1 * y2, 4), Fraction(x1 * y2 + x2 * y1, 4)


def _squarefree_kernel(n: int) -> int:
    out = 1
    for p, e in factor_int(n).items():
        if e % 2:
            out *= p
    return out


def enumerate_cm(D: int, X: int) -> list[CMFieldRecord]:
    """Every totally imaginary quadratic extension E/F, F = Q(sqrt D), with |d_E| <= X."""
    if D <= 1 or not is_fundamental(D):
        raise EnumerationError(f"{D} is not a positive fundamental discriminant")
    if D * D > X:
        return []
    limit = X // (D * D)
    B = trace_bound(D, X)
    buckets: dict[tuple[int, int], list[tuple[int, int]]] = defaultdict(list)
    found: list[tuple[int, int, int]] = []
    for s in range(1, B + 1):
        x = -s
        ymax = math.isqrt((s * s - 1) // D)
        while ymax >= 0 and D * ymax * ymax >= s * s:
            ymax -= 1
        for yabs in range(0, ymax + 1):
            if (x - yabs * D) % 2:
                continue
            for y in ((yabs,) if yabs == 0 else (yabs, -yabs)):
                rel = relative_discriminant_norm(D, x, y)
                if rel > limit:
                    continue
                norm = (x * x - D * y * y) // 4
                key = (rel, _squarefree_kernel(norm))
                bucket = buckets[key]
                if any(is_square_in_F(_product(D, (x, y), other), D) for other in bucket):
                    continue
                bucket.append((x, y))
                found.append((rel, x, y))
    out = []
    for rel, x, y in found:
        sq = SquareClassRep(D, x, y)
        out.append(CMFieldRecord(D, sq, D * D * rel, rel, classify_galois(sq)))
    out.sort(key=lambda r: (r.abs_disc, -r.square_class.x, abs(r.square_class.y), -r.square_class.y))
    return out


def enumerate_all(X: int, discs: Iterable[int] | None = None) -> list[CMFieldRecord]:
    if discs is None:
        discs = [D for D in range(5, math.isqrt(X) + 1) if is_fundamental(D)]
    out: list[CMFieldRecord] = []
    for D in discs:
        out.extend(enumerate_cm(D, X))
    out.sort(key=lambda r: (r.abs_disc, r.base_D, -r.square_class.x, abs(r.square_class.y), -r.square_class.y))
    return out


@dataclass
class CountReport:
    X: int
    n_cm: int
    n_weyl: int
    n_not_weyl: int
    ratio_weyl: float
    slope_fit: float
    checkpoints: list[tuple[int, int, int, int]] = field(default_factory=list)  # (X, n_cm, n_weyl, n_not_weyl)
    per_type: dict[str, int] = field(default_factory=dict)
    per_d: dict[int, int] = field(default_factory=dict)

    @property
    def density(self) -> float:
        return self.n_cm / self.X

    def to_dict(self) -> dict:
        data = asdict(self)
        data["checkpoints"] = [list(c) for c in self.checkpoints]
        data["per_d"] = {str(k): v for k, v in self.per_d.items()}
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "CountReport":
        data = dict(data)
        data["checkpoints"] = [tuple(c) for c in data.get("checkpoints", [])]
        data["per_d"] = {int(k): v for k, v in data.get("per_d", {}).items()}
        return cls(**data)


def dyadic_checkpoints(X: int, lowest: int = 1000) -> list[int]:
    pts = []
    x = X
    while x >= lowest:
        pts.append(x)
        x //= 2
    return sorted(pts) or [X]


def _counts(records: Sequence[CMFieldRecord], X: int) -> tuple[int, int, int]:
    n = w = 0
    for r in records:
        if r.abs_disc > X:
            break
        n += 1
        w += r.weyl
    return n, w, n - w


def slope(points: Sequence[tuple[int, int]]) -> float:
    pts = [(math.log(x), math.log(n)) for x, n in points if n > 0]
    if len(pts) < 2:
        return float("nan")
    xs, ys = zip(*pts)
    return float(np.polyfit(xs, ys, 1)[0])


def count_report(X: int, checkpoints: Sequence[int] | None = None,
                 records: Sequence[CMFieldRecord] | None = None) -> CountReport:
    if X < 125:
        raise EnumerationError("X must be at least 125")
    recs = list(records) if records is not None else enumerate_all(X)
    recs.sort(key=lambda r: r.abs_disc)
    pts = sorted(set(checkpoints)) if checkpoints else dyadic_checkpoints(X)
    if max(pts) > X:
        raise EnumerationError("checkpoints must not exceed X")
    rows = [(c, *_counts(recs, c)) for c in pts]
    n, w, nw = _counts(recs, X)
    per_type = {t: sum(1 for r in recs if r.abs_disc <= X and r.galois_type == t) for t in GALOIS_TYPES}
    per_d: dict[int, int] = defaultdict(int)
    for r in recs:
        if r.abs_disc <= X:
            per_d[r.base_D] += 1
    return CountReport(
        X=X,
        n_cm=n,
        n_weyl=w,
        n_not_weyl=nw,
        ratio_weyl=w / n if n else 0.0,
        slope_fit=slope([(r[0], r[3]) for r in rows]),
        checkpoints=rows,
        per_type=per_type,
        per_d=dict(sorted(per_d.items())),
    )


def group_model(galois_type: str):
    """The Galois group of E^c/Q as a signed permutation group on the two conjugate pairs."""
    from .permcore import Perm, SignedGroup, SignedPerm, transitive_group, wreath_c2

    swap = Perm((1, 0))
    if galois_type == "D4":
        return wreath_c2(transitive_group("2T1"))
    if galois_type == "C4":
        return SignedGroup(2, (SignedPerm((1, 0), swap),))
    if galois_type == "V4":
        return SignedGroup(2, (SignedPerm((1, 1), Perm.identity(2)), SignedPerm((0, 0), swap)))
    raise EnumerationError(f"unknown Galois type {galois_type}")
