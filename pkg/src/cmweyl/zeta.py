"""Dedekind zeta data for totally real fields: L-values, Euler products, residues.

Bulk paths are vectorised with numpy; the scalar entry points share the same code
so that a single field and a batch of fields produce identical numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from scipy import special

from .errors import CmWeylError, DegreeError, PrecisionError
from .polyutil import discriminant, factor_pattern

ZETA2 = math.pi**2 / 6
EPS = np.finfo(float).eps
DEFAULT_TOL = 1e-4
MAX_PRIME = 50_000_000

# sum_{p > P} p^-2 <= RS_CONST / (P log P), from pi(x) < 1.25506 x / log x
RS_CONST = 2.5102


@dataclass(frozen=True)
class EulerProductValue:
    value: float
    tail_bound: float
    primes_used: int

    def __post_init__(self) -> None:
        if self.tail_bound < 0:
            raise ValueError("tail_bound must be non-negative")


@dataclass(frozen=True)
class SplittingType:
    p: int
    degrees: tuple[int, ...]
    exponents: tuple[int, ...]
    ramified: bool
    index_divisor: bool

    @property
    def ramified_flag(self) -> bool:
        return self.ramified

    @property
    def index_divisor_flag(self) -> bool:
        return self.index_divisor


# primes -----------------------------------------------------------------------


@lru_cache(maxsize=8)
def primes_up_to(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i :: i] = False
    return np.flatnonzero(sieve).astype(np.int64)


@lru_cache(maxsize=4)
def smallest_prime_factor(n: int) -> np.ndarray:
    spf = np.zeros(n + 1, dtype=np.int64)
    for p in primes_up_to(math.isqrt(n)):
        block = spf[p * p :: p]
        block[block == 0] = p
    idx = np.flatnonzero(spf == 0)
    spf[idx] = idx
    return spf


def prime_tail(P: float) -> float:
    """Upper bound for sum_{p > P} -log(1 - p^-2)."""
    if P < 17:
        raise ValueError("prime bound too small for the tail estimate")
    return RS_CONST / (P * math.log(P)) / (1 - P**-2)


def factor_int(n: int) -> dict[int, int]:
    n = abs(n)
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


# quadratic characters ------------------------------------------------------------


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D | n)."""
    if n == 0:
        return 1 if abs(D) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if D < 0:
            result = -result
    while n % 2 == 0:
        n //= 2
        if D % 2 == 0:
            return 0
        if D % 8 in (3, 5):
            result = -result
    # Jacobi symbol (D | n), n odd positive
    a = D % n if n > 1 else 0
    if n == 1:
        return result
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker_array(D: int, n: np.ndarray) -> np.ndarray:
    """Vectorised (D | n) for positive integers n."""
    n = np.asarray(n, dtype=np.int64).copy()
    if np.any(n <= 0):
        raise ValueError("n must be positive")
    res = np.ones(n.shape, dtype=np.int64)
    # factor out powers of two
    two = 0 if D % 2 == 0 else (1 if D % 8 in (1, 7) else -1)
    while True:
        even = (n % 2 == 0)
        if not even.any():
            break
        res[even] *= two
        n[even] //= 2
    a = np.mod(D, n)
    m = n.copy()
    active = m > 1
    res[~active & (m != 1)] = 0
    while active.any():
        # strip factors of two from a
        while True:
            ev = active & (a % 2 == 0) & (a != 0)
            if not ev.any():
                break
            a[ev] //= 2
            flip = ev & ((m % 8 == 3) | (m % 8 == 5))
            res[flip] = -res[flip]
        zero = active & (a == 0)
        res[zero & (m != 1)] = 0
        active &= ~zero
        if not active.any():
            break
        a_new = np.where(active, m, a)
        m_new = np.where(active, a, m)
        flip = active & (a_new % 4 == 3) & (m_new % 4 == 3)
        res[flip] = -res[flip]
        a = np.where(active, np.mod(a_new, np.where(m_new == 0, 1, m_new)), a)
        m = m_new
        done = active & (m == 1)
        active &= ~done
    return res


def is_fundamental(D: int) -> bool:
    if D in (0, 1):
        return False
    if D % 4 == 1:
        return _squarefree(abs(D))
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and _squarefree(abs(m))
    return False


def _squarefree(n: int) -> bool:
    return all(e == 1 for e in factor_int(n).values())


def chi_prime(Ds: np.ndarray, p: int) -> np.ndarray:
    """chi_D(p) for a prime p and an array of discriminants."""
    Ds = np.asarray(Ds, dtype=np.int64)
    if p == 2:
        r = Ds % 8
        return np.where(Ds % 2 == 0, 0, np.where((r == 1) | (r == 7), 1, -1)).astype(np.int8)
    table = -np.ones(p, dtype=np.int8)
    table[(np.arange(1, p, dtype=np.int64) ** 2) % p] = 1
    table[0] = 0
    return table[Ds % p]


def character_values(D: int, N: int) -> np.ndarray:
    """chi_D(n) for 0 <= n <= N, built multiplicatively from chi_D at prime powers."""
    out = np.ones(N + 1, dtype=np.int64)
    out[0] = 1 if abs(D) == 1 else 0
    for p in primes_up_to(N):
        p = int(p)
        c = kronecker(D, p)
        if c == 1:
            continue
        q = p
        while q <= N:
            if c == 0:
                out[q::q] = 0
            else:
                out[q::q] *= -1
            q *= p
    return out


def chi_matrix(Ds: np.ndarray, N: int) -> np.ndarray:
    """chi_D(n) for every D in Ds and 1 <= n <= N; column 0 is unused (n = 0)."""
    Ds = np.asarray(Ds, dtype=np.int64)
    out = np.zeros((len(Ds), N + 1), dtype=np.int8)
    if N < 1:
        return out
    out[:, 1] = 1
    spf = smallest_prime_factor(max(N, 2))
    for p in primes_up_to(N):
        p = int(p)
        out[:, p] = chi_prime(Ds, p)
    for n in range(4, N + 1):
        p = spf[n]
        if p != n:
            out[:, n] = out[:, p] * out[:, n // p]
    return out


# L(s, chi_D) ------------------------------------------------------------------------


def _theta_terms(s: int, D: np.ndarray, n: np.ndarray) -> np.ndarray:
    """Smoothed term weights w_s(n, D) with L(s, chi_D) = sum chi_D(n) w_s(n, D)."""
    D = D[:, None].astype(float)
    n = n[None, :].astype(float)
    a = math.pi * n * n / D
    if s == 1:
        return special.erfc(np.sqrt(a)) / n + special.exp1(a) / np.sqrt(D)
    if s == 2:
        ea = np.exp(-a)
        # sqrt(a) Gamma(-1/2, a) = 2 e^-a (1 - sqrt(pi a) erfcx(sqrt a))
        g = 2 * ea * (1 - np.sqrt(math.pi * a) * special.erfcx(np.sqrt(a)))
        return (math.pi / D) * (D / (math.pi * n * n) * ea + g)
    raise ValueError("s must be 1 or 2")


def _theta_tail(s: int, D: float, N: int) -> float:
    """Bound on the omitted terms n > N of the smoothed series."""
    a0 = math.pi * (N + 1) ** 2 / D
    geom = math.exp(-a0) / (1 - math.exp(-2 * math.pi * (N + 1) / D))
    if s == 1:
        # erfc(x) <= e^-x^2 and E1(a) <= e^-a / a <= e^-a once a >= 1
        return (1 / (N + 1) + 1 / math.sqrt(D)) * geom
    # D/(pi n^2) e^-a = e^-a / a and sqrt(a) Gamma(-1/2, a) <= e^-a / a
    return (math.pi / D) * (2 / a0) * geom


def _theta_length(s: int, D: float, tol: float) -> int:
    N = max(1, int(math.sqrt(D / math.pi)))
    while math.pi * (N + 1) ** 2 / D < 1 or _theta_tail(s, D, N) > tol:
        N += max(1, N // 8)
    return N


def l_values(Ds: Sequence[int], s: int, tol: float = 1e-12, chunk: int = 4096) -> tuple[np.ndarray, np.ndarray]:
    """Batch L(s, chi_D) for positive fundamental D by the smoothed series.

    Returns (values, error bounds).  The bounds include a rounding allowance.
    """
    Ds = np.asarray(list(Ds), dtype=np.int64)
    vals = np.zeros(len(Ds))
    errs = np.zeros(len(Ds))
    if len(Ds) == 0:
        return vals, errs
    if np.any(Ds <= 1):
        raise CmWeylError("smoothed series requires D > 1")
    order = np.argsort(Ds)
    for start in range(0, len(Ds), chunk):
        idx = order[start : start + chunk]
        block = Ds[idx]
        N = _theta_length(s, float(block.max()), tol / 2)
        n = np.arange(1, N + 1)
        chi = chi_matrix(block, N)[:, 1:].astype(float)
        w = _theta_terms(s, block, n)
        vals[idx] = np.sum(chi * w, axis=1)
        tails = np.array([_theta_tail(s, float(D), N) for D in block])
        rounding = 8 * N * EPS * np.abs(w).max(axis=1)
        errs[idx] = tails + rounding
    return vals, errs


def l_value(D: int, s: int, tol: float = 1e-10, method: str = "auto") -> EulerProductValue:
    """L(s, chi_D) for a fundamental discriminant D (D = 1 is the trivial character).

    s = 1 uses the finite character sum, s = 2 the smoothed series.  ``method``
    may force "finite" or "theta" for cross-checks.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if s not in (1, 2):
        raise ValueError("s must be 1 or 2")
    if D == 1:
        if s == 1:
            raise CmWeylError("zeta(s) has a pole at s = 1")
        return EulerProductValue(ZETA2, 0.0, 0)
    if not is_fundamental(D):
        raise CmWeylError(f"{D} is not a fundamental discriminant")
    if method == "auto":
        method = "finite" if s == 1 else "theta"
    if method == "finite":
        value, err = _finite_l(D, s)
        if err > tol:
            raise PrecisionError(f"rounding error {err:.2e} of the finite sum exceeds tol {tol:.2e}")
        return EulerProductValue(value, err, 0)
    if method == "theta":
        if D < 0:
            raise CmWeylError("smoothed series implemented for real characters (D > 0)")
        vals, errs = l_values([D], s, tol)
        if errs[0] > tol:
            raise PrecisionError(f"achieved bound {errs[0]:.2e} exceeds tol {tol:.2e}")
        return EulerProductValue(float(vals[0]), float(errs[0]), 0)
    raise ValueError(f"unknown method {method!r}")


def _finite_l(D: int, s: int) -> tuple[float, float]:
    q = abs(D)
    a = np.arange(1, q)
    chi = character_values(D, q - 1)[1:].astype(float)
    if D > 0:
        if s == 1:
            terms = chi * np.log(np.sin(np.pi * a / q))
            factor = -1 / math.sqrt(q)
        else:
            terms = chi * (a.astype(float) ** 2)
            factor = math.pi**2 / q**2.5
        value = factor * math.fsum(terms)
        scale = float(np.abs(terms).max()) if len(terms) else 0.0
        err = 4 * q * EPS * max(scale, 1.0) * abs(factor)
        return value, float(err)
    if s == 1:
        value = -math.pi * math.fsum(chi * a) / q**1.5
        return value, 4 * q * EPS
    raise CmWeylError("L(2, chi_D) for D < 0 is not implemented")


# splitting ------------------------------------------------------------------------


def index_primes(record) -> dict[int, int]:
    """Primes dividing the polynomial index [O_F : Z[theta]] of a record."""
    pdisc = discriminant(record.poly)
    if pdisc % record.discriminant:
        raise CmWeylError(f"{record.label}: disc(poly) not divisible by field discriminant")
    sq = abs(pdisc // record.discriminant)
    idx = math.isqrt(sq)
    if idx * idx != sq:
        raise CmWeylError(f"{record.label}: disc(poly)/d_F is not a square")
    return factor_int(idx)


def splitting_type(poly: Sequence[int], p: int, index: int | None = None) -> SplittingType:
    """Factor pattern of poly mod p; ``index`` is the polynomial index if known."""
    if not poly or poly[-1] % p == 0:
        raise CmWeylError(f"leading coefficient divisible by {p}")
    pattern = factor_pattern(poly, p)
    degrees = tuple(f for f, _ in pattern)
    exps = tuple(e for _, e in pattern)
    idx_flag = bool(index) and index % p == 0
    return SplittingType(p, degrees, exps, any(e > 1 for e in exps), idx_flag)


def local_factor(degrees: Iterable[int], p: int) -> float:
    """prod over primes above p of (1 - p^{-2f})^{-1}."""
    out = 1.0
    for f in degrees:
        out /= -math.expm1(-2 * f * math.log(p))
    return out


def _bracket(d: int, p: int) -> tuple[float, float]:
    """Extreme local factors at s = 2 for an unknown prime of degree-d field."""
    lo = local_factor([d], p)
    hi = local_factor([1] * d, p)
    return lo, hi


# Euler products --------------------------------------------------------------------


def prime_bound_for(tol: float, d: int, cap: int = MAX_PRIME) -> int:
    """Smallest P (on a coarse grid) with zeta(2)^d (exp((d-1) S(P)) - 1) <= tol."""
    if d <= 1:
        return 17
    target = math.log1p(tol / ZETA2**d) / max(d - 1, 1)
    P = 17
    while prime_tail(P) > target:
        P = int(P * 1.25) + 1
        if P > cap:
            raise PrecisionError(
                f"tolerance {tol:.1e} needs primes beyond the cap {cap}; "
                f"best bound {ZETA2**d * math.expm1((d - 1) * prime_tail(cap)):.2e}"
            )
    return P


def _mulmod(A: np.ndarray, B: np.ndarray, cm: np.ndarray, p: np.ndarray) -> np.ndarray:
    L, d = A.shape
    prod = np.zeros((L, 2 * d - 1), dtype=np.int64)
    for i in range(d):
        prod[:, i : i + d] += A[:, i : i + 1] * B
        if i % 4 == 3:
            prod %= p[:, None]
    prod %= p[:, None]
    for k in range(2 * d - 2, d - 1, -1):
        t = prod[:, k]
        prod[:, k - d : k] = (prod[:, k - d : k] - t[:, None] * cm) % p[:, None]
    return prod[:, :d]


def _mulx(A: np.ndarray, cm: np.ndarray, p: np.ndarray) -> np.ndarray:
    top = A[:, -1]
    out = np.empty_like(A)
    out[:, 0] = 0
    out[:, 1:] = A[:, :-1]
    return (out - top[:, None] * cm) % p[:, None]


def frobenius_counts(cm: np.ndarray, p: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Factor-degree counts (linear, quadratic, remaining degree) of square-free f mod p.

    ``cm`` holds the non-leading coefficients of monic f reduced mod p (one row per
    lane) and every p must exceed the degree.  Uses Tr(Q) and Tr(Q^2) of the
    Frobenius matrix Q, which count roots in F_p and F_{p^2}.
    """
    L, d = cm.shape
    X = np.zeros((L, d), dtype=np.int64)
    X[:, 0] = 1
    nbits = int(p.max()).bit_length()
    for bit in range(nbits - 1, -1, -1):
        X = _mulmod(X, X, cm, p)
        sel = ((p >> bit) & 1).astype(bool)
        if sel.any():
            X[sel] = _mulx(X[sel], cm[sel], p[sel])
    cols = [None] * d
    cols[0] = np.zeros((L, d), dtype=np.int64)
    cols[0][:, 0] = 1
    if d > 1:
        cols[1] = X
    for j in range(2, d):
        cols[j] = _mulmod(cols[j - 1], X, cm, p)
    tr1 = np.zeros(L, dtype=np.int64)
    tr2 = np.zeros(L, dtype=np.int64)
    for j in range(d):
        tr1 += cols[j][:, j]
        for i in range(d):
            tr2 = (tr2 + cols[j][:, i] * cols[i][:, j]) % p
    n1 = tr1 % p
    n2 = (tr2 - n1) // 2
    rest = d - n1 - 2 * n2
    return n1, n2, rest


def _log_factor_from_counts(n1, n2, rest, p: np.ndarray) -> np.ndarray:
    """log of F_p (1 - p^-2) for the given factor-degree counts."""
    lp = np.log(p.astype(float))
    l2 = -np.log1p(-np.exp(-2 * lp))
    l4 = -np.log1p(-np.exp(-4 * lp))
    lr = np.where(rest > 0, -np.log1p(-np.exp(-2 * np.maximum(rest, 1) * lp)), 0.0)
    return n1 * l2 + n2 * l4 + lr - l2


@dataclass
class _Prepared:
    pdisc: list[int]
    index: list[dict[int, int]]


def _prepare(records: Sequence) -> _Prepared:
    d = records[0].degree
    pdisc, index = [], []
    for rec in records:
        if rec.degree != d:
            raise DegreeError("records of mixed degree")
        pd = discriminant(rec.poly)
        pdisc.append(pd)
        sq = abs(pd // rec.discriminant)
        idx = math.isqrt(sq)
        if pd % rec.discriminant or idx * idx != sq:
            raise CmWeylError(f"{rec.label}: disc(poly)/d_F is not a square")
        index.append(factor_int(idx) if idx > 1 else {})
    return _Prepared(pdisc, index)


def _special_log_factor(rec, p: int, idx_primes: dict[int, int]) -> tuple[float, float, float]:
    """(log factor, low log, high log) for a prime handled one field at a time."""
    base = -math.log1p(-(p ** -2.0))
    if p in idx_primes:
        override = getattr(rec, "local_factors", None) or {}
        if p in override:
            v = math.log(local_factor(override[p], p)) - base
            return v, v, v
        lo, hi = _bracket(rec.degree, p)
        llo, lhi = math.log(lo) - base, math.log(hi) - base
        return 0.5 * (llo + lhi), llo, lhi
    st = splitting_type(rec.poly, p)
    v = math.log(local_factor(st.degrees, p)) - base
    return v, v, v


def euler_log_sums(records: Sequence, P: int, chunk_lanes: int = 400_000) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """For each record: sum over p <= P of log(F_p (1 - p^-2)), with bracket lows/highs."""
    n = len(records)
    if n == 0:
        return np.zeros(0), np.zeros(0), np.zeros(0)
    d = records[0].degree
    primes = primes_up_to(P)
    total = np.zeros(n)
    lo = np.zeros(n)
    hi = np.zeros(n)
    if d == 1:
        return total, lo, hi
    if d == 2:
        Ds = np.array([r.discriminant for r in records], dtype=np.int64)
        for p in primes:
            p = int(p)
            chi = chi_prime(Ds, p)
            base = -math.log1p(-(p ** -2.0))
            v = np.where(chi == 1, base, np.where(chi == -1, -math.log1p(-(p ** -4.0)) - base, 0.0))
            total += v
        return total, total.copy(), total.copy()
    prep = _prepare(records)
    small = {int(q) for q in primes if q <= d}
    special_primes: list[set[int]] = []
    for i in range(n):
        special_primes.append(small | {q for q in factor_int(prep.pdisc[i]) if q <= P})
    for i, rec in enumerate(records):
        for q in special_primes[i]:
            v, a, b = _special_log_factor(rec, q, prep.index[i])
            total[i] += v
            lo[i] += a
            hi[i] += b
    regular = primes[primes > d]
    if not len(regular):
        return total, lo, hi
    coeffs = np.array([[int(c) for c in rec.poly[:d]] for rec in records], dtype=object)
    if np.abs(coeffs).max() >= 2**62:
        raise CmWeylError("polynomial coefficients too large for the vectorised Euler product")
    coeffs = coeffs.astype(np.int64)
    per = max(1, chunk_lanes // n)
    for start in range(0, len(regular), per):
        ps = regular[start : start + per]
        k = len(ps)
        pos = {int(q): j for j, q in enumerate(ps)}
        lanes_p = np.tile(ps, n)
        field_idx = np.repeat(np.arange(n), k)
        keep = np.ones(n * k, dtype=bool)
        for i, sp in enumerate(special_primes):
            for q in sp:
                j = pos.get(q)
                if j is not None:
                    keep[i * k + j] = False
        cm = np.repeat(coeffs, k, axis=0)[keep] % lanes_p[keep, None]
        n1, n2, rest = frobenius_counts(cm, lanes_p[keep])
        contrib = _log_factor_from_counts(n1, n2, rest, lanes_p[keep])
        fi = field_idx[keep]
        add = np.bincount(fi, weights=contrib, minlength=n)
        total += add
        lo += add
        hi += add
    return total, lo, hi


def zeta_f_at_2_many(records: Sequence, tol: float = DEFAULT_TOL, prime_bound: int | None = None,
                     method: str = "auto") -> list[EulerProductValue]:
    """zeta_F(2) for records of one degree with a rigorous truncation bound each."""
    records = list(records)
    if not records:
        return []
    d = records[0].degree
    if d == 1:
        return [EulerProductValue(ZETA2, 0.0, 0) for _ in records]
    if d == 2 and method in ("auto", "lfunction") and prime_bound is None:
        vals, errs = l_values([r.discriminant for r in records], 2, tol / (2 * ZETA2))
        return [EulerProductValue(ZETA2 * v, ZETA2 * e, 0) for v, e in zip(vals, errs)]
    P = prime_bound if prime_bound is not None else prime_bound_for(tol, d)
    total, lo, hi = euler_log_sums(records, P)
    S = prime_tail(P)
    used = len(primes_up_to(P))
    out = []
    for t, a, b in zip(total, lo, hi):
        Z = ZETA2 * math.exp(t)
        upper = ZETA2 * math.exp(b + (d - 1) * S)
        lower = ZETA2 * math.exp(a - S)
        bound = max(upper - Z, Z - lower)
        out.append(EulerProductValue(Z, bound, used))
    if prime_bound is None:
        worst = max(v.tail_bound for v in out)
        if worst > tol:
            raise PrecisionError(f"achieved bound {worst:.2e} exceeds tol {tol:.2e} (unresolved index primes)")
    return out


def zeta_f_at_2(record, tol: float = DEFAULT_TOL, prime_bound: int | None = None,
                method: str = "auto") -> EulerProductValue:
    return zeta_f_at_2_many([record], tol, prime_bound, method)[0]


def euler_partial_products(record, cutoffs: Sequence[int]) -> list[float]:
    """Raw truncated products prod_{p <= P} F_p for each cut-off P."""
    out = []
    for P in cutoffs:
        t, _, _ = euler_log_sums([record], int(P))
        # undo the (1 - p^-2) normalisation
        primes = primes_up_to(int(P))
        back = float(-np.sum(np.log1p(-(primes.astype(float) ** -2)))) if len(primes) else 0.0
        out.append(math.exp(float(t[0]) + back))
    return out


# residues -------------------------------------------------------------------------------


def residue_zeta(record) -> float:
    """Res_{s=1} zeta_F(s) from the analytic class number formula."""
    h = getattr(record, "class_number", None)
    R = getattr(record, "regulator", None)
    if h is None or R is None:
        raise CmWeylError(f"incomplete record {getattr(record, 'label', '?')}: class number and regulator required")
    r1, r2 = record.signature
    w = 2 if r1 > 0 else getattr(record, "roots_of_unity", None)
    if w is None:
        raise CmWeylError("roots of unity count needed for totally complex fields")
    return 2**r1 * (2 * math.pi) ** r2 * h * R / (w * math.sqrt(abs(record.discriminant)))
