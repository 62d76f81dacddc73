"""Command line interface: ``cmweyl <command> ...`` (also ``python -m cmweyl``).

Exit codes: 0 success, 1 bad arguments, 2 data or computation error,
3 an acceptance check failed.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from typing import Sequence

from .errors import CmWeylError

EXIT_OK, EXIT_PARSE, EXIT_DATA, EXIT_ACCEPT = 0, 1, 2, 3


class ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with status 2
        raise ArgumentError(f"{self.prog}: {message}")


@dataclass
class RunConfig:
    """The parsed command and options; ``argv()`` replays the run exactly."""

    command: list[str]
    options: dict = field(default_factory=dict)
    seed: int = 0

    @classmethod
    def from_namespace(cls, ns: argparse.Namespace) -> "RunConfig":
        opts = {k: v for k, v in vars(ns).items() if k not in ("func", "command", "sub", "seed", "save_config")}
        cmd = [ns.command] + ([ns.sub] if getattr(ns, "sub", None) else [])
        return cls(cmd, opts, ns.seed)

    def argv(self) -> list[str]:
        out = ["--seed", str(self.seed), *self.command]
        for k, v in sorted(self.options.items()):
            flag = "--" + k.replace("_", "-")
            if v is None or v is False:
                continue
            if v is True:
                out.append(flag)
            elif isinstance(v, list):
                out += [flag, *map(str, v)]
            else:
                out += [flag, str(v)]
        return out

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        data = json.loads(text)
        return cls(list(data["command"]), dict(data.get("options", {})), int(data.get("seed", 0)))


# formatting -------------------------------------------------------------------


def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _emit_rows(rows: list[dict], columns: Sequence[str], emit: str, out=None) -> None:
    out = out or sys.stdout
    if emit == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow(["" if r.get(c) is None else (repr(r[c]) if isinstance(r[c], float) else r[c]) for c in columns])
        return
    if emit == "json":
        json.dump(rows, out, indent=2)
        out.write("\n")
        return
    cells = [[_fmt(r.get(c)) for c in columns] for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(columns)]
    out.write("  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip() + "\n")
    for row in cells:
        out.write("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() + "\n")


def _dump(obj: dict) -> None:
    json.dump(obj, sys.stdout, indent=2, sort_keys=False, default=str)
    sys.stdout.write("\n")


# commands ---------------------------------------------------------------------


def _load_catalog(args):
    from .catalog import load, load_bundled, synthesize_quadratic

    if getattr(args, "synth", None):
        if args.degree != 2:
            raise ArgumentError("--synth is only available for degree 2")
        return synthesize_quadratic(args.synth)
    if getattr(args, "catalog", None):
        return load(args.catalog, args.degree)
    return load_bundled(args.degree)


def cmd_catalog(args) -> int:
    from .catalog import Catalog, fetch_remote, synthesize_quadratic

    if args.sub == "synth":
        cat = synthesize_quadratic(args.max_disc)
    elif args.sub == "fetch":
        cat = fetch_remote(args.url, args.degree, args.max_disc, retries=args.retries,
                           timeout=args.timeout, use_cache=not args.no_cache)
    else:
        cat = _load_catalog(args)
    if getattr(args, "max_disc", None) and args.sub == "load":
        cat = cat.up_to(args.max_disc)
    if args.out:
        cat.write(args.out)
    if args.emit == "json" and args.records:
        _dump({"source": cat.source, "degree": cat.degree, "records": [r.to_dict() for r in cat]})
        return EXIT_OK
    rows = []
    for g in cat.groups():
        sub: Catalog = cat.filter(g)
        rows.append({"group": g, "n_fields": len(sub), "min_disc": sub.records[0].discriminant,
                     "max_disc": sub.records[-1].discriminant})
    if args.emit == "table":
        print(f"# {cat.source}")
        print(f"# degree {cat.degree}, {len(cat)} fields")
    _emit_rows(rows, ["group", "n_fields", "min_disc", "max_disc"], args.emit)
    return EXIT_OK


def cmd_residues(args) -> int:
    from .residues import residue_partial_sum, residue_table

    cat = _load_catalog(args)
    if args.first:
        cat = cat.first(args.first)
    if args.group:
        rep = residue_partial_sum(cat.filter(args.group), args.tol)
        if args.emit == "json":
            _dump(rep.to_dict())
            return EXIT_OK
        rows = [{"group": rep.group, "n_fields": rep.n_fields, "min_disc": rep.min_disc,
                 "residue": rep.partial_sum, "proportion": None}]
    else:
        table = residue_table(cat, args.tol)
        if args.emit == "json":
            _dump(table.to_dict())
            return EXIT_OK
        rows = table.rows()
        if len(table.reports) == 1:
            rows = rows[1:]
    if args.emit == "table":
        print(f"# {cat.source}")
    _emit_rows(rows, ["group", "n_fields", "min_disc", "residue", "proportion"], args.emit)
    return EXIT_OK


def cmd_proportions(args) -> int:
    from .residues import residue_table

    cat = _load_catalog(args)
    if args.first:
        cat = cat.first(args.first)
    table = residue_table(cat, args.tol)
    rows = [{"group": r.group, "residue": r.partial_sum, "proportion": r.proportion} for r in table.reports]
    _emit_rows(rows, ["group", "residue", "proportion"], args.emit)
    return EXIT_OK


def cmd_count_cm(args) -> int:
    from .cm_enum import count_report

    pts = [int(x) for x in args.checkpoints.split(",")] if args.checkpoints else None
    rep = count_report(args.x, pts)
    if args.emit == "json":
        data = rep.to_dict()
        if not args.per_d:
            data.pop("per_d")
        _dump(data)
        return EXIT_OK
    rows = [{"X": x, "n_cm": n, "n_weyl": w, "n_not_weyl": nw, "ratio_weyl": w / n if n else 0.0}
            for x, n, w, nw in rep.checkpoints]
    _emit_rows(rows, ["X", "n_cm", "n_weyl", "n_not_weyl", "ratio_weyl"], args.emit)
    if args.emit == "table":
        print(f"# n_cm/X = {rep.density:.6f}; slope of n_not_weyl = {rep.slope_fit:.3f}; "
              f"types {rep.per_type}")
    if args.per_d:
        print()
        _emit_rows([{"D": d, "n_fields": n} for d, n in rep.per_d.items()], ["D", "n_fields"], args.emit)
    return EXIT_OK


def cmd_classify(args) -> int:
    from .cm_enum import (CMFieldRecord, SquareClassRep, classify_galois, relative_discriminant_norm)
    from .exponents import parse_rational
    from .zeta import is_fundamental

    D = args.disc
    if D <= 1 or not is_fundamental(D):
        raise CmWeylError(f"{D} is not a positive fundamental discriminant")
    try:
        a, b = (parse_rational(t) for t in args.alpha.split(","))
    except ValueError as exc:
        raise ArgumentError(f"--alpha expects a,b (rationals): {exc}") from exc
    x, y = 2 * a, 2 * b
    if x.denominator != 1 or y.denominator != 1 or (x - y * D) % 2:
        raise CmWeylError(f"{a} + {b}*sqrt({D}) is not an algebraic integer")
    sq = SquareClassRep(D, int(x), int(y))
    gtype = classify_galois(sq)
    rel = relative_discriminant_norm(D, sq.x, sq.y)
    rec = CMFieldRecord(D, sq, D * D * rel, rel, gtype)
    data = rec.to_dict()
    data.update(weyl=rec.weyl, alpha=str(sq), min_poly=list(rec.min_poly()))
    if args.emit == "json":
        _dump(data)
    else:
        for k in ("alpha", "galois_type", "weyl", "rel_norm", "abs_disc", "min_poly"):
            print(f"{k}: {data[k]}")
    return EXIT_OK


def cmd_group(args) -> int:
    from .permcore import (CMTypeMask, PermGroup, cm_type_orbit, group_name, is_abelian, is_transitive,
                           min_index_and_a, resolve_label, transitive_group, wreath_c2)

    if args.gens:
        G = PermGroup.from_strings(args.degree, args.gens)
        name = "<" + ", ".join(args.gens) + ">"
    else:
        if not args.label:
            raise ArgumentError("give --label or --gens")
        label = resolve_label(args.label, args.degree)
        G = transitive_group(label)
        name = f"{label} ({group_name(label)})"
    d = args.degree
    if args.check == "order":
        W = wreath_c2(G)
        print(f"|C2 wr {name}| = {W.order()} = 2^{d} * {G.order()}")
    elif args.check == "abelian":
        W = wreath_c2(G)
        print(f"C2 wr {name} is {'abelian' if is_abelian(W) else 'non-abelian'}")
    elif args.check == "index":
        ind, a = min_index_and_a(G)
        print(f"min index {ind}, a(G) = {a}")
    else:
        W = wreath_c2(G)
        mask = CMTypeMask.parse(args.mask) if args.mask else CMTypeMask.all_masks(d)[0]
        size = cm_type_orbit(W, mask)
        verdict = "transitive" if size == 2**d else f"not transitive ({2**d // size} orbits of this size)"
        if not is_transitive(G):
            verdict += "; G itself is intransitive"
        print(f"orbit size {size} = 2^{int(math.log2(size))}: {verdict}" if size & (size - 1) == 0
              else f"orbit size {size}: {verdict}")
    return EXIT_OK


def cmd_exponents(args) -> int:
    from .exponents import ExponentInput, c2_c3, parse_rational, table_lookup

    try:
        delta = parse_rational(args.delta)
        dprime = parse_rational(args.subconvex)
    except ValueError as exc:
        raise ArgumentError(str(exc)) from exc
    inputs = []
    for k, m in enumerate(args.malle or []):
        try:
            inputs.append(ExponentInput(args.d, delta, parse_rational(m), dprime, f"M{k + 1}"))
        except ValueError as exc:
            raise ArgumentError(str(exc)) from exc
    for lab in args.group or []:
        M, source, _ = table_lookup(args.d, lab)
        inputs.append(ExponentInput(args.d, delta, M, dprime, lab))
        if args.emit == "table":
            print(f"# M({lab}) = {M} from {source}")
    if not inputs:
        raise ArgumentError("give at least one --malle value or --group label")
    es = c2_c3(inputs)
    if args.emit == "json":
        _dump(es.to_dict())
    else:
        print(f"C1={es.C1} alpha={es.alpha} beta={es.beta} C2={es.C2} C3={es.C3}")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_all

    only = [int(x) for x in args.only.split(",")] if args.only else None
    results = run_all(only, echo=print, verbose=not args.quiet)
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    return EXIT_OK if passed == len(results) else EXIT_ACCEPT


# parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cmweyl", description="Residues, CM field counts and exponents for CM fields over totally real fields.")
    p.add_argument("--seed", type=int, default=0, help="recorded in the run config (no command is random)")
    p.add_argument("--save-config", metavar="PATH", help="write the parsed run config as JSON")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def emit(sp, choices=("table", "csv", "json")):
        sp.add_argument("--emit", choices=choices, default="table")

    cat = sub.add_parser("catalog", help="load, fetch or synthesize a field catalog")
    csub = cat.add_subparsers(dest="sub", parser_class=_Parser)
    csub.required = True
    for name in ("load", "fetch", "synth"):
        sp = csub.add_parser(name)
        emit(sp)
        sp.add_argument("--out", help="write the catalog to this path (.tsv or .tsv.gz)")
        sp.add_argument("--records", action="store_true", help="with --emit json, dump every record")
        if name == "load":
            sp.add_argument("--degree", type=int, required=True)
            sp.add_argument("--catalog", help="catalog file (default: bundled snapshot)")
            sp.add_argument("--max-disc", type=int)
        elif name == "fetch":
            sp.add_argument("--url", required=True)
            sp.add_argument("--degree", type=int, required=True)
            sp.add_argument("--max-disc", type=int, required=True)
            sp.add_argument("--retries", type=int, default=3)
            sp.add_argument("--timeout", type=float, default=30.0)
            sp.add_argument("--no-cache", action="store_true")
        else:
            sp.add_argument("--max-disc", type=int, required=True)
        sp.set_defaults(func=cmd_catalog)

    for name, func in (("residues", cmd_residues), ("proportions", cmd_proportions)):
        sp = sub.add_parser(name, help=f"{name} r_d(G) from a catalog")
        sp.add_argument("--degree", type=int, required=True)
        if name == "residues":
            sp.add_argument("--group", help="dT label or name, e.g. 3T1 or C3")
        sp.add_argument("--catalog", help="catalog file (default: bundled snapshot)")
        sp.add_argument("--synth", type=int, metavar="MAX_DISC", help="degree 2: synthesize fields up to MAX_DISC")
        sp.add_argument("--first", type=int, help="use only the first N fields")
        sp.add_argument("--tol", type=float, help="absolute tolerance on zeta_F(2)")
        emit(sp)
        sp.set_defaults(func=func)

    sp = sub.add_parser("count-cm", help="count quartic CM fields by discriminant")
    sp.add_argument("--x", type=int, required=True)
    sp.add_argument("--per-d", action="store_true")
    sp.add_argument("--checkpoints", help="comma separated bounds for the growth fit (default: dyadic)")
    emit(sp)
    sp.set_defaults(func=cmd_count_cm)

    sp = sub.add_parser("classify", help="classify F(sqrt alpha) over F = Q(sqrt D)")
    sp.add_argument("--disc", type=int, required=True)
    sp.add_argument("--alpha", required=True, help="a,b meaning a + b*sqrt(D)")
    emit(sp, ("table", "json"))
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("group", help="wreath product checks for a permutation group")
    sp.add_argument("--degree", type=int, required=True)
    sp.add_argument("--label", help="transitive group label, e.g. 5T5")
    sp.add_argument("--gens", nargs="+", help='generators in cycle notation, e.g. "(1,2)(3,4,5)"')
    sp.add_argument("--check", choices=("orbit", "abelian", "order", "index"), default="orbit")
    sp.add_argument("--mask", help="CM type as a 0/1 string for --check orbit")
    sp.set_defaults(func=cmd_group)

    sp = sub.add_parser("exponents", help="exact error-term exponents")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--delta", default="0", help="2-torsion exponent delta_d, e.g. 2/5")
    sp.add_argument("--malle", nargs="+", help="M(G) for each group, e.g. 1 3/2")
    sp.add_argument("--group", nargs="+", help="take M(G) from the bound tables for these labels")
    sp.add_argument("--subconvex", default="0", help="subconvexity exponent delta'")
    emit(sp, ("table", "json"))
    sp.set_defaults(func=cmd_exponents)

    sp = sub.add_parser("verify", help="run the acceptance checks")
    sp.add_argument("--only", help="comma separated criterion numbers")
    sp.add_argument("--quiet", action="store_true")
    sp.set_defaults(func=cmd_verify)
    return p


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except ArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    if args.save_config:
        with open(args.save_config, "w") as fh:
            fh.write(RunConfig.from_namespace(args).to_json() + "\n")
    try:
        return args.func(args)
    except ArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (CmWeylError, OSError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
