"""Offline oracle: quartic CM field discriminants up to X from PARI's nflist.

Prints one line per field extension E/F: "<abs_disc> <type>", with D4 fields listed
twice (once per embedding of the conjugate quadratic extension).  Requires cypari2.
"""

from __future__ import annotations

import argparse
import sys

import cypari2

pari = cypari2.Pari()
pari.allocatemem(2 * 10**9)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("X", type=int)
    args = ap.parse_args()
    out = []
    for G in ("C4", "V4", "D4"):
        # signature 2 = two complex places, i.e. totally complex quartics
        for f in pari(f'nflist("{G}",[1,{args.X}],2)'):
            disc = abs(int(pari.nfdisc(f)))
            if G == "D4":
                sub = pari.nfsubfields(f, 2)
                if int(pari.nfdisc(sub[0][0])) < 0:
                    continue
                out += [(disc, G), (disc, G)]
            else:
                out.append((disc, G))
    for disc, G in sorted(out):
        print(disc, G)


if __name__ == "__main__":
    sys.exit(main())
