"""Regenerate the bundled totally real field snapshots.

Offline tool, not imported by the package.  Needs ``cypari2`` (PARI/GP 2.15+)
and, for A5 quintics, the PARI ``nflistdata`` tables::

    python tools/build_catalogs.py --out src/cmweyl/data --nflistdata /path/to/share/pari

Degrees 3 and 4 are the first 25,000 totally real fields ordered by
discriminant.  Degree 5 uses ``nflist`` for C5/D5/F5/A5 and a Hunter search
(all totally real quintics with d <= bound) for everything, which also
supplies the S5 fields.  Class numbers and regulators come from ``bnfinit``
(conditional on GRH, as in any PARI run without ``bnfcertify``).
"""

from __future__ import annotations

import argparse
import gzip
import math
import sys
import time

import numpy as np
import cypari2

pari = cypari2.Pari()
pari.allocatemem(2 * 10**9, silent=True)

QUAD_MAX = 2000
_INVARIANTS = pari("(f)->my(nf=nfinit(f),b=bnfinit(nf,1));[nf,nf.disc,b.no,b.reg,nf.index]")
FIRST_N = 25000
DEG5_BOUND = 22_700_000


def log(msg):
    print(time.strftime("%H:%M:%S"), msg, flush=True)


def galois_label(f):
    g = pari.polgalois(f)
    return f"{int(pari.poldegree(f))}T{int(g[2])}"


def record_line(f, label_counter):
    f = pari.polredabs(f)
    nf, disc, h, reg, index = _INVARIANTS(f)
    disc, h, reg, index = int(disc), int(h), float(reg), int(index)
    d = int(pari.poldegree(f))
    local = []
    if index > 1:
        for p in pari.factor(index)[0]:
            fs = sorted(int(pr[3]) for pr in pari.idealprimedec(nf, p))
            local.append(f"{int(p)}:" + ".".join(map(str, fs)))
    coeffs = [int(c) for c in pari.Vecrev(f)]
    k = label_counter.get(disc, 0) + 1
    label_counter[disc] = k
    return (disc, str(f), "\t".join([
        f"{d}.{d}.{disc}.{k}", str(d), str(disc), ",".join(map(str, coeffs)),
        galois_label(f), str(h), repr(reg), f"{d},0", ";".join(local) or "-",
    ]))


def write(path, header, polys):
    polys = sorted(polys, key=lambda t: (t[0], str(t[1])))
    counter = {}
    lines = []
    for i, (_, f) in enumerate(polys):
        lines.append(record_line(f, counter)[2])
        if i % 2000 == 0:
            log(f"  {path}: {i}/{len(polys)}")
    opener = gzip.open if path.endswith(".gz") else open
    with opener(path, "wt") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        fh.write("\n".join(lines) + "\n")
    log(f"wrote {path} ({len(lines)} records)")


def nflist(group, bound):
    return [(int(pari.nfdisc(f)), pari.polredabs(f))
            for f in pari(f'nflist("{group}",[1,{bound}],0)')]


def first_n(polys, n):
    polys = sorted(polys, key=lambda t: (t[0], str(t[1])))
    return polys[:n]


def quadratic(out):
    polys = []
    for D in range(5, QUAD_MAX + 1):
        if int(pari.isfundamental(D)):
            f = pari(f"x^2-x-{(D - 1) // 4}") if D % 4 == 1 else pari(f"x^2-{D // 4}")
            polys.append((D, f))
    write(f"{out}/quadratic.tsv", [
        "degree 2 totally real fields, every fundamental discriminant 5 <= D <= %d" % QUAD_MAX,
        "source: PARI/GP %s bnfinit" % ".".join(map(str, pari.version()[:3])),
    ], polys)


def cubic(out):
    polys = nflist("C3", 2_000_000) + nflist("S3", 600_000)
    polys = first_n(polys, FIRST_N)
    write(f"{out}/cubic.tsv.gz", [
        "degree 3 totally real fields: the first %d ordered by discriminant (d <= %d)"
        % (FIRST_N, polys[-1][0]),
        "source: PARI/GP nflist + bnfinit",
    ], polys)


def quartic(out, bound):
    polys = []
    for g in ("C4", "V4", "D4", "A4", "S4"):
        t = time.time()
        got = nflist(g, bound)
        log(f"  nflist {g} <= {bound}: {len(got)} ({time.time() - t:.0f}s)")
        polys += got
    if len(polys) < FIRST_N:
        raise SystemExit(f"quartic bound {bound} too small: {len(polys)} fields")
    polys = first_n(polys, FIRST_N)
    write(f"{out}/quartic.tsv.gz", [
        "degree 4 totally real fields: the first %d ordered by discriminant (d <= %d)"
        % (FIRST_N, polys[-1][0]),
        "source: PARI/GP nflist + bnfinit",
    ], polys)


# -- Hunter search for totally real quintics -------------------------------

def _val(c, x):
    r = 0.0
    for a in c:
        r = r * x + a
    return r


def _real_sorted(coeffs):
    r = np.roots(coeffs)
    if np.max(np.abs(r.imag)) > 1e-6:
        return None
    return np.sort(r.real)


def hunter_candidates(X):
    """Yield monic quintics with all roots real and T2 within Hunter's bound."""
    B0 = math.sqrt(2) * (X / 5.0) ** 0.25
    eps = 1e-7
    for c4 in (0, -1, -2):
        B = c4 * c4 / 5.0 + B0
        for c3 in range(math.ceil((c4 * c4 - B) / 2 - 1e-9), math.floor(0.4 * c4 * c4 + 1e-9) + 1):
            r = _real_sorted([60, 24 * c4, 6 * c3])
            if r is None:
                continue
            h = [20, 12 * c4, 6 * c3, 0]
            for c2 in range(math.ceil(-_val(h, r[0]) / 2 - eps), math.floor(-_val(h, r[1]) / 2 + eps) + 1):
                s = _real_sorted([20, 12 * c4, 6 * c3, 2 * c2])
                if s is None:
                    continue
                g = [5, 4 * c4, 3 * c3, 2 * c2, 0]
                lo = -_val(g, s[1])
                hi = -max(_val(g, s[0]), _val(g, s[2]))
                for c1 in range(math.ceil(lo - eps), math.floor(hi + eps) + 1):
                    t = _real_sorted([5, 4 * c4, 3 * c3, 2 * c2, c1])
                    if t is None:
                        continue
                    q = [1, c4, c3, c2, c1, 0]
                    a = math.ceil(-min(_val(q, t[0]), _val(q, t[2])) - eps)
                    b = math.floor(-max(_val(q, t[1]), _val(q, t[3])) + eps)
                    for c0 in range(a, b + 1):
                        if c0:
                            yield (1, c4, c3, c2, c1, c0)


def quintic(out, bound):
    proc = pari("(V,X)->my(R=List());for(i=1,#V,my(f=V[i]);"
                "if(polisirreducible(f),my(D=nfdisc(f));if(D<=X,listput(R,[D,polredabs(f)]))));Vec(R)")
    found = {}
    chunk = []
    n = 0

    def flush():
        for D, g in proc(pari(chunk), bound):
            found[str(g)] = (int(D), g)
        chunk.clear()

    t = time.time()
    for c in hunter_candidates(bound):
        chunk.append(pari.Pol(list(c)))
        n += 1
        if len(chunk) >= 200_000:
            flush()
            log(f"  hunter: {n} candidates, {len(found)} fields ({time.time() - t:.0f}s)")
    flush()
    log(f"hunter done: {n} candidates, {len(found)} fields")
    # cross-check against nflist for the solvable/A5 groups
    for g in ("C5", "D5", "F5", "A5"):
        for D, f in nflist(g, bound):
            if str(f) not in found:
                raise SystemExit(f"hunter search missed {g} field {f} (d={D})")
    polys = first_n(list(found.values()), FIRST_N)
    write(f"{out}/quintic.tsv.gz", [
        "degree 5 totally real fields: all %d with d <= %d (Hunter search, cross-checked against nflist)"
        % (len(polys), polys[-1][0]),
        "source: PARI/GP nfdisc/polredabs + bnfinit",
    ], polys)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", required=True)
    ap.add_argument("--nflistdata", default=None)
    ap.add_argument("--only", nargs="*", default=["2", "3", "4", "5"])
    ap.add_argument("--quartic-bound", type=int, default=2_000_000)
    ap.add_argument("--quintic-bound", type=int, default=DEG5_BOUND)
    args = ap.parse_args()
    if args.nflistdata:
        pari(f'default(datadir,"{args.nflistdata}")')
    if "2" in args.only:
        quadratic(args.out)
    if "3" in args.only:
        cubic(args.out)
    if "4" in args.only:
        quartic(args.out, args.quartic_bound)
    if "5" in args.only:
        quintic(args.out, args.quintic_bound)


if __name__ == "__main__":
    sys.exit(main())
