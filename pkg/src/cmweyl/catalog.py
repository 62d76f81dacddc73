"""Totally real field records: parsing, validation, bundled snapshots, remote fetch.

Record files are tab-separated, one field per line, '#' starts a comment::

    label  degree  disc  coeffs(low->high)  galois  h  R  r1,r2  local

``local`` lists residue degrees at primes dividing the polynomial index,
e.g. ``2:1.2;3:3``, or ``-`` when there are none.
"""

from __future__ import annotations

import gzip
import hashlib
import json
import math
import os
import time
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import CatalogError, CatalogTransportError
from .permcore import TRANSITIVE, TRANSITIVE_ORDERS
from .polyutil import discriminant, sturm_real_roots

MIN_DISC = {1: 1, 2: 5, 3: 49, 4: 725, 5: 14641}
CACHE_ENV = "CMWEYL_CACHE"

BUNDLED = {
    2: "quadratic.tsv",
    3: "cubic.tsv.gz",
    4: "quartic.tsv.gz",
    5: "quintic.tsv.gz",
}


@dataclass(frozen=True)
class FieldRecord:
    label: str
    degree: int
    discriminant: int
    poly: tuple[int, ...]
    galois_label: str
    class_number: int | None
    regulator: float | None
    signature: tuple[int, int]
    local_factors: dict[int, tuple[int, ...]] = field(default_factory=dict, compare=False, hash=False)

    @property
    def hR(self) -> float:
        if self.class_number is None or self.regulator is None:
            raise CatalogError(f"incomplete record {self.label}")
        return self.class_number * self.regulator

    def to_line(self) -> str:
        local = ";".join(
            f"{p}:" + ".".join(map(str, fs)) for p, fs in sorted(self.local_factors.items())
        ) or "-"
        return "\t".join([
            self.label,
            str(self.degree),
            str(self.discriminant),
            ",".join(map(str, self.poly)),
            self.galois_label,
            "-" if self.class_number is None else str(self.class_number),
            "-" if self.regulator is None else repr(float(self.regulator)),
            f"{self.signature[0]},{self.signature[1]}",
            local,
        ])

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "degree": self.degree,
            "disc": self.discriminant,
            "coeffs": list(self.poly),
            "galois_label": self.galois_label,
            "class_number": self.class_number,
            "regulator": self.regulator,
            "signature": list(self.signature),
            "local": {str(p): list(fs) for p, fs in self.local_factors.items()},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FieldRecord":
        try:
            local = {int(p): tuple(int(f) for f in fs) for p, fs in (data.get("local") or {}).items()}
            sig = data.get("signature") or [int(data["degree"]), 0]
            h = data.get("class_number")
            R = data.get("regulator")
            return cls(
                label=str(data["label"]),
                degree=int(data["degree"]),
                discriminant=int(data["disc"]),
                poly=tuple(int(c) for c in data["coeffs"]),
                galois_label=str(data["galois_label"]),
                class_number=None if h is None else int(h),
                regulator=None if R is None else float(R),
                signature=(int(sig[0]), int(sig[1])),
                local_factors=local,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CatalogError(f"malformed record payload: {exc}") from exc


def parse_line(line: str, lineno: int = 0) -> FieldRecord:
    parts = line.rstrip("\n").split("\t")
    if len(parts) not in (8, 9):
        raise CatalogError(f"line {lineno}: expected 8 or 9 tab-separated fields, got {len(parts)}")
    try:
        label, deg, disc, coeffs, gal, h, R, sig = parts[:8]
        local: dict[int, tuple[int, ...]] = {}
        if len(parts) == 9 and parts[8].strip() not in ("", "-"):
            for item in parts[8].split(";"):
                p, fs = item.split(":")
                local[int(p)] = tuple(int(f) for f in fs.split("."))
        r1, r2 = (int(x) for x in sig.split(","))
        return FieldRecord(
            label=label,
            degree=int(deg),
            discriminant=int(disc),
            poly=tuple(int(c) for c in coeffs.split(",")),
            galois_label=gal,
            class_number=None if h == "-" else int(h),
            regulator=None if R == "-" else float(R),
            signature=(r1, r2),
            local_factors=local,
        )
    except ValueError as exc:
        raise CatalogError(f"line {lineno}: {exc}") from exc


def validate_record(rec: FieldRecord, degree: int | None = None) -> None:
    """Raise CatalogError naming the record when an invariant fails."""
    def bad(msg: str) -> CatalogError:
        return CatalogError(f"record {rec.label}: {msg}")

    d = rec.degree
    if degree is not None and d != degree:
        raise bad(f"degree {d}, catalog degree {degree}")
    if len(rec.poly) != d + 1 or rec.poly[-1] != 1:
        raise bad("polynomial must be monic of the stated degree")
    if rec.signature != (d, 0):
        raise bad(f"signature {rec.signature} is not totally real")
    if rec.discriminant <= 0:
        raise bad("discriminant must be positive")
    if rec.discriminant < MIN_DISC.get(d, 1):
        raise bad(f"discriminant {rec.discriminant} below the degree-{d} minimum {MIN_DISC[d]}")
    if rec.class_number is None or rec.regulator is None:
        raise bad("class number and regulator are required")
    if rec.class_number < 1 or not rec.regulator > 0:
        raise bad("class number and regulator must be positive")
    if d >= 2:
        pd = discriminant(rec.poly)
        if pd <= 0 or pd % rec.discriminant:
            raise bad(f"disc(poly) = {pd} is not a multiple of {rec.discriminant}")
        q = pd // rec.discriminant
        if math.isqrt(q) ** 2 != q:
            raise bad(f"disc(poly)/d_F = {q} is not a square")
        if sturm_real_roots(rec.poly) != d:
            raise bad("polynomial does not have all roots real")
    if d <= 5:
        if rec.galois_label not in TRANSITIVE or not rec.galois_label.startswith(f"{d}T"):
            raise bad(f"unknown Galois label {rec.galois_label} for degree {d}")
        if math.factorial(d) % TRANSITIVE_ORDERS[rec.galois_label]:
            raise bad("group order does not divide d!")


@dataclass
class Catalog:
    records: list[FieldRecord]
    source: str
    degree: int
    group_filter: str | None = None

    def __post_init__(self) -> None:
        self.records = sorted(self.records, key=lambda r: (r.discriminant, r.label))
        seen: set[str] = set()
        for r in self.records:
            if r.label in seen:
                raise CatalogError(f"duplicate label {r.label}")
            seen.add(r.label)
            if r.degree != self.degree:
                raise CatalogError(f"record {r.label} has degree {r.degree}, catalog degree {self.degree}")

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[FieldRecord]:
        return iter(self.records)

    def groups(self) -> list[str]:
        return sorted({r.galois_label for r in self.records}, key=lambda s: int(s.split("T")[1]))

    def filter(self, group: str | None) -> "Catalog":
        if group is None:
            return self
        from .permcore import resolve_label

        lab = resolve_label(group, self.degree)
        return Catalog([r for r in self.records if r.galois_label == lab], self.source, self.degree, lab)

    def first(self, n: int) -> "Catalog":
        return Catalog(self.records[:n], f"{self.source} (first {n})", self.degree, self.group_filter)

    def up_to(self, max_disc: int) -> "Catalog":
        return Catalog([r for r in self.records if r.discriminant <= max_disc],
                       f"{self.source} (disc <= {max_disc})", self.degree, self.group_filter)

    def merge(self, other: "Catalog") -> "Catalog":
        if other.degree != self.degree:
            raise CatalogError("cannot merge catalogs of different degree")
        by_label = {r.label: r for r in self.records}
        for r in other.records:
            if r.label in by_label and by_label[r.label] != r:
                raise CatalogError(f"conflicting records for {r.label}")
            by_label[r.label] = r
        return Catalog(list(by_label.values()), f"{self.source} + {other.source}", self.degree)

    def write(self, path: str | Path) -> None:
        path = Path(path)
        opener = gzip.open if path.suffix == ".gz" else open
        with opener(path, "wt") as fh:
            fh.write(f"# source: {self.source}\n")
            for r in self.records:
                fh.write(r.to_line() + "\n")


def _read_lines(path: Path) -> Iterable[str]:
    if path.suffix == ".gz":
        with gzip.open(path, "rt") as fh:
            yield from fh
    else:
        with open(path) as fh:
            yield from fh


def parse_stream(lines: Iterable[str], degree: int, source: str, group: str | None = None,
                 validate: bool = True) -> Catalog:
    records = []
    notes = []
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        if line.startswith("#"):
            notes.append(line[1:].strip())
            continue
        rec = parse_line(line, lineno)
        if validate:
            validate_record(rec, degree)
        elif rec.degree != degree:
            raise CatalogError(f"line {lineno}: degree {rec.degree}, expected {degree}")
        records.append(rec)
    prov = source + ("; " + " | ".join(notes) if notes else "")
    return Catalog(records, prov, degree).filter(group)


def load(path: str | Path, degree: int, group: str | None = None, validate: bool = True) -> Catalog:
    path = Path(path)
    if not path.exists():
        raise CatalogError(f"no such catalog file: {path}")
    return parse_stream(_read_lines(path), degree, str(path), group, validate)


def bundled_path(degree: int) -> Path:
    if degree not in BUNDLED:
        raise CatalogError(f"no bundled catalog for degree {degree}")
    return Path(str(resources.files("cmweyl") / "data" / BUNDLED[degree]))


def load_bundled(degree: int, group: str | None = None, validate: bool = True) -> Catalog:
    return load(bundled_path(degree), degree, group, validate)


# quadratic fields from scratch ------------------------------------------------


def fundamental_discriminants(max_disc: int, min_disc: int = 5) -> list[int]:
    """Positive fundamental discriminants in [min_disc, max_disc] by sieving squares."""
    if max_disc < min_disc:
        return []
    n = max_disc
    sqf = np.ones(n + 1, dtype=bool)
    for k in range(2, math.isqrt(n) + 1):
        sqf[k * k :: k * k] = False
    out = []
    D = np.arange(n + 1)
    ok1 = (D % 4 == 1) & sqf
    m = D // 4
    ok0 = (D % 4 == 0) & np.isin(m % 4, (2, 3)) & sqf[m]
    mask = (ok1 | ok0) & (D >= max(min_disc, 2))
    out = np.flatnonzero(mask).tolist()
    return out


def regulators(Ds: Iterable[int]) -> np.ndarray:
    """log of the fundamental unit of Q(sqrt D), from the period of a reduced expansion."""
    Ds = np.asarray(list(Ds), dtype=np.int64)
    if len(Ds) == 0:
        return np.zeros(0)
    root = np.array([math.isqrt(int(D)) for D in Ds], dtype=np.int64)
    sq = np.sqrt(Ds.astype(float))
    # xi_0 = (b + sqrt D)/2 with b = largest integer < sqrt D of the parity of D
    b = np.where((root - Ds) % 2 == 0, root, root - 1)
    b = np.where(b * b == Ds, b - 2, b)
    P0, Q0 = b.copy(), np.full_like(b, 2)
    P, Q = P0.copy(), Q0.copy()
    logsum = np.zeros(len(Ds))
    active = np.ones(len(Ds), dtype=bool)
    steps = 0
    while active.any():
        idx = np.flatnonzero(active)
        p, q, D = P[idx], Q[idx], Ds[idx]
        logsum[idx] += np.log((p + sq[idx]) / q)
        a = (p + root[idx]) // q
        p2 = a * q - p
        q2 = (D - p2 * p2) // q
        P[idx], Q[idx] = p2, q2
        back = (p2 == P0[idx]) & (q2 == Q0[idx])
        active[idx[back]] = False
        steps += 1
        if steps > 10 * int(Ds.max()) + 10:
            raise CatalogError("continued fraction period did not close")
    return logsum


def rational_field() -> FieldRecord:
    return FieldRecord("1.1.1.1", 1, 1, (0, 1), "1T1", 1, 1.0, (1, 0))


def quadratic_poly(D: int) -> tuple[int, int, int]:
    return (-(D - 1) // 4, -1, 1) if D % 4 == 1 else (-(D // 4), 0, 1)


def synthesize_quadratic(max_disc: int, validate: bool = True) -> Catalog:
    """Every real quadratic field with discriminant <= max_disc, invariants computed here.

    R comes from the continued fraction period; h is recovered from
    h R = sqrt(D) L(1, chi_D) / 2 and must round cleanly.
    """
    from .zeta import l_values

    Ds = fundamental_discriminants(max_disc)
    if not Ds:
        return Catalog([], f"synthesized real quadratic fields, D <= {max_disc}", 2)
    R = regulators(Ds)
    L1, _ = l_values(Ds, 1, tol=1e-9)
    hraw = np.sqrt(np.asarray(Ds, dtype=float)) * L1 / (2 * R)
    h = np.rint(hraw)
    worst = float(np.abs(hraw - h).max())
    if worst > 1e-4:
        raise CatalogError(f"class number did not round cleanly (off by {worst:.2e})")
    records = []
    for D, hh, RR in zip(Ds, h, R):
        rec = FieldRecord(f"2.2.{D}.1", 2, int(D), quadratic_poly(int(D)), "2T1", int(hh), float(RR), (2, 0))
        if validate:
            validate_record(rec, 2)
        records.append(rec)
    return Catalog(records, f"synthesized real quadratic fields, D <= {max_disc}", 2)


# remote -------------------------------------------------------------------------

REMOTE_FORMAT = """\
GET <base_url>?degree=<d>&disc_min=<a>&disc_max=<b>&offset=<k>
returns JSON {"records": [record, ...], "next_offset": <int or null>}
record = {"label": str, "degree": int, "disc": int, "coeffs": [int, ...] (low to high),
          "galois_label": "dTk", "class_number": int, "regulator": float,
          "signature": [r1, r2], "local": {"p": [f, ...]} (optional)}
"""


def cache_dir() -> Path:
    base = os.environ.get(CACHE_ENV)
    path = Path(base) if base else Path.home() / ".cache" / "cmweyl"
    path.mkdir(parents=True, exist_ok=True)
    return path


def _get_json(url: str, retries: int, timeout: float, backoff: float) -> dict:
    last: Exception | None = None
    for attempt in range(1, retries + 1):
        try:
            with urllib.request.urlopen(url, timeout=timeout) as resp:
                body = resp.read()
            break
        except urllib.error.HTTPError as exc:
            if exc.code < 500:
                raise CatalogTransportError(f"HTTP {exc.code} from {url}", attempt) from exc
            last = exc
        except (urllib.error.URLError, OSError, TimeoutError) as exc:
            last = exc
        if attempt < retries:
            time.sleep(backoff * attempt)
    else:
        raise CatalogTransportError(f"cannot reach {url}: {last}", retries) from last
    try:
        data = json.loads(body)
    except json.JSONDecodeError as exc:
        raise CatalogError(f"malformed JSON from {url}: {exc}") from exc
    if not isinstance(data, dict) or not isinstance(data.get("records"), list):
        raise CatalogError(f"malformed payload from {url}: missing 'records' list")
    return data


def fetch_remote(base_url: str, degree: int, max_disc: int, *, retries: int = 3, timeout: float = 30.0,
                 backoff: float = 0.5, use_cache: bool = True, max_pages: int = 10_000) -> Catalog:
    """Fetch every record of the given degree with disc <= max_disc (format: REMOTE_FORMAT)."""
    source = f"{base_url} degree={degree} disc<={max_disc}"
    if max_disc < MIN_DISC.get(degree, 1):
        return Catalog([], source, degree)
    key = hashlib.sha256(source.encode()).hexdigest()[:20]
    cached = cache_dir() / f"remote-{degree}-{key}.tsv"
    if use_cache and cached.exists():
        return load(cached, degree)
    records: list[FieldRecord] = []
    offset: int | None = 0
    pages = 0
    while offset is not None:
        query = urllib.parse.urlencode({"degree": degree, "disc_min": 1, "disc_max": max_disc, "offset": offset})
        sep = "&" if "?" in base_url else "?"
        data = _get_json(f"{base_url}{sep}{query}", retries, timeout, backoff)
        for item in data["records"]:
            if not isinstance(item, dict):
                raise CatalogError("malformed payload: record is not an object")
            rec = FieldRecord.from_dict(item)
            validate_record(rec, degree)
            if rec.discriminant <= max_disc:
                records.append(rec)
        nxt = data.get("next_offset")
        if nxt is not None and (not isinstance(nxt, int) or nxt <= offset):
            raise CatalogError("malformed payload: next_offset must increase")
        offset = nxt
        pages += 1
        if pages > max_pages:
            raise CatalogError("too many pages")
    cat = Catalog(records, source, degree)
    if use_cache:
        tmp = cached.with_suffix(".part")
        cat.write(tmp)
        tmp.replace(cached)
    return cat
