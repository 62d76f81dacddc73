"""Small exact polynomial helpers: discriminants, Sturm counts, factor patterns mod p.

Polynomials are coefficient sequences, lowest degree first.
"""

from __future__ import annotations

from typing import Sequence

Poly = Sequence[int]


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def power_sums(poly: Poly, count: int) -> list[int]:
    """Newton power sums s_0..s_{count-1} of the roots of a monic integer polynomial."""
    d = len(poly) - 1
    if poly[-1] != 1:
        raise ValueError("polynomial must be monic")
    # e_k via coefficients: x^d + c_{d-1} x^{d-1} + ... ; e_k = (-1)^k c_{d-k}
    e = [1] + [(-1) ** k * poly[d - k] for k in range(1, d + 1)]
    s = [d]
    for k in range(1, count):
        acc = 0
        for i in range(1, min(k, d) + 1):
            term = e[i] * (s[k - i] if i < k else 0)
            acc += (-1) ** (i - 1) * term
        if k <= d:
            acc += (-1) ** (k - 1) * k * e[k]
        s.append(acc)
    return s


def _bareiss_minors(m: list[list[int]]) -> list[int]:
    """Leading principal minors of an integer matrix (no pivoting)."""
    n = len(m)
    a = [row[:] for row in m]
    minors = []
    prev = 1
    for k in range(n):
        if a[k][k] == 0:
            # fall back to exact determinant of each remaining leading block
            return minors + [_det(m, j) for j in range(k + 1, n + 1)]
        minors.append(a[k][k])
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return minors


def _det(m: list[list[int]], size: int) -> int:
    from fractions import Fraction

    a = [[Fraction(x) for x in row[:size]] for row in m[:size]]
    det = Fraction(1)
    for k in range(size):
        piv = next((i for i in range(k, size) if a[i][k] != 0), None)
        if piv is None:
            return 0
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        det *= a[k][k]
        for i in range(k + 1, size):
            f = a[i][k] / a[k][k]
            for j in range(k, size):
                a[i][j] -= f * a[k][j]
    return int(det)


def hankel_minors(poly: Poly) -> list[int]:
    """Leading principal minors of the power-sum Hankel matrix; the last is disc(poly)."""
    d = len(poly) - 1
    s = power_sums(poly, 2 * d - 1)
    h = [[s[i + j] for j in range(d)] for i in range(d)]
    return _bareiss_minors(h)


def discriminant(poly: Poly) -> int:
    return hankel_minors(poly)[-1]


def sturm_real_roots(poly: Poly) -> int:
    """Number of distinct real roots via a signed pseudo-remainder Sturm sequence."""
    p0 = _trim(list(poly))
    if len(p0) <= 1:
        return 0
    p1 = _trim([i * c for i, c in enumerate(p0)][1:])
    seq = [p0, p1]
    while len(seq[-1]) > 1:
        a, b = seq[-2], seq[-1]
        r = _signed_prem(a, b)
        if not r:
            break
        seq.append([-c for c in r])
    # sign changes at -inf and +inf from leading terms
    def changes(signs: list[int]) -> int:
        signs = [s for s in signs if s]
        return sum(1 for x, y in zip(signs, signs[1:]) if x != y)

    at_pos = [1 if q[-1] > 0 else -1 for q in seq]
    at_neg = [(1 if q[-1] > 0 else -1) * (-1) ** (len(q) - 1) for q in seq]
    return changes(at_neg) - changes(at_pos)


def _signed_prem(a: list[int], b: list[int]) -> list[int]:
    """Remainder of a by b scaled by a positive constant, then made primitive."""
    from math import gcd

    r = a[:]
    lb = b[-1]
    db = len(b) - 1
    scale = abs(lb)
    sgn = 1 if lb > 0 else -1
    while len(r) - 1 >= db and r:
        lr = r[-1]
        shift = len(r) - 1 - db
        # r <- |lb| * r - sgn * lr * x^shift * b, keeps the sign of the true remainder
        r = [c * scale for c in r]
        for i, c in enumerate(b):
            r[i + shift] -= sgn * lr * c
        _trim(r)
    if r:
        g = 0
        for c in r:
            g = gcd(g, c)
        r = [c // g for c in r]
    return r


# arithmetic mod p ------------------------------------------------------------


def _pmod(a: Poly, p: int) -> list[int]:
    return _trim([c % p for c in a])


def _pdivmod(a: list[int], b: list[int], p: int) -> tuple[list[int], list[int]]:
    a = a[:]
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        k = len(a) - len(b)
        t = a[-1] * inv % p
        q[k] = t
        for i, c in enumerate(b):
            a[i + k] = (a[i + k] - t * c) % p
        _trim(a)
    return _trim(q), a


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    while b:
        _, r = _pdivmod(a, b, p)
        a, b = b, r
    if not a:
        return a
    inv = pow(a[-1], -1, p)
    return [c * inv % p for c in a]


def _pmul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _ppowmod(base: list[int], e: int, mod: list[int], p: int) -> list[int]:
    result = [1]
    base = _pdivmod(base, mod, p)[1]
    while e:
        if e & 1:
            result = _pdivmod(_pmul(result, base, p), mod, p)[1]
        base = _pdivmod(_pmul(base, base, p), mod, p)[1]
        e >>= 1
    return result


def _pderiv(a: list[int], p: int) -> list[int]:
    return _trim([(i * c) % p for i, c in enumerate(a)][1:])


def _squarefree_parts(f: list[int], p: int) -> list[tuple[list[int], int]]:
    """Square-free factorisation of a monic f over F_p as (factor, multiplicity)."""
    out: list[tuple[list[int], int]] = []
    i = 1
    fp = _pderiv(f, p)
    if not fp:
        # f is a p-th power
        root = [f[k] for k in range(0, len(f), p)]
        return [(g, m * p) for g, m in _squarefree_parts(root, p)]
    c = _pgcd(f, fp, p)
    w = _pdivmod(f, c, p)[0]
    while len(w) > 1:
        y = _pgcd(w, c, p)
        z = _pdivmod(w, y, p)[0]
        if len(z) > 1:
            out.append((z, i))
        i += 1
        w = y
        c = _pdivmod(c, y, p)[0]
    if len(c) > 1:
        root = [c[k] for k in range(0, len(c), p)]
        out.extend((g, m * p) for g, m in _squarefree_parts(root, p))
    return out


def _distinct_degree(f: list[int], p: int) -> list[int]:
    """Degrees of the irreducible factors of a square-free monic f over F_p."""
    degs: list[int] = []
    x = [0, 1]
    h = x
    k = 0
    while len(f) - 1 >= 2 * (k + 1):
        k += 1
        h = _ppowmod(h, p, f, p)
        diff = _trim([(a - b) % p for a, b in zip(h + [0] * (len(x) - len(h)), x + [0] * (len(h) - len(x)))])
        g = _pgcd(f, diff, p)
        if len(g) > 1:
            degs += [k] * ((len(g) - 1) // k)
            f = _pdivmod(f, g, p)[0]
            h = _pdivmod(h, f, p)[1]
    if len(f) > 1:
        degs.append(len(f) - 1)
    return degs


def factor_pattern(poly: Poly, p: int) -> list[tuple[int, int]]:
    """(residue degree, multiplicity) of each irreducible factor of poly mod p, sorted."""
    f = _pmod(poly, p)
    if not f or len(f) != len(poly):
        raise ValueError(f"leading coefficient vanishes mod {p}")
    inv = pow(f[-1], -1, p)
    f = [c * inv % p for c in f]
    pattern = []
    for part, mult in _squarefree_parts(f, p):
        pattern += [(deg, mult) for deg in _distinct_degree(part, p)]
    return sorted(pattern)
