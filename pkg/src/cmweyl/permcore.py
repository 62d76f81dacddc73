"""Permutation groups, the signed wreath product C2 wr G and its action on CM types.

Points are 0-based internally; cycle strings use the usual 1-based notation.
Composition follows the functional convention: ``(s * t)(i) = s(t(i))``.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

from .errors import CmWeylError, DegreeError, GroupSizeError

DEFAULT_CAP = 1_000_000

_CYCLE_RE = re.compile(r"\(([^()]*)\)")


@dataclass(frozen=True)
class Perm:
    images: tuple[int, ...]

    def __post_init__(self) -> None:
        d = len(self.images)
        if d == 0 or sorted(self.images) != list(range(d)):
            raise ValueError(f"not a permutation: {self.images}")

    @property
    def degree(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, d: int) -> "Perm":
        return cls(tuple(range(d)))

    @classmethod
    def from_cycles(cls, text: str, degree: int) -> "Perm":
        """Parse cycle notation such as ``"(1,2)(3,4,5)"`` (1-based)."""
        images = list(range(degree))
        stripped = text.replace(" ", "")
        if stripped in ("", "()", "1", "e"):
            return cls(tuple(images))
        if _CYCLE_RE.sub("", stripped):
            raise ValueError(f"bad cycle notation: {text!r}")
        seen: set[int] = set()
        for body in _CYCLE_RE.findall(text):
            parts = [p for p in re.split(r"[,\s]+", body.strip()) if p]
            pts = [int(p) - 1 for p in parts]
            for p in pts:
                if not 0 <= p < degree:
                    raise ValueError(f"point {p + 1} out of range for degree {degree}")
                if p in seen:
                    raise ValueError(f"point {p + 1} repeated in {text!r}")
                seen.add(p)
            for a, b in zip(pts, pts[1:] + pts[:1]):
                images[a] = b
        return cls(tuple(images))

    def __mul__(self, other: "Perm") -> "Perm":
        if other.degree != self.degree:
            raise DegreeError("degree mismatch")
        return Perm(tuple(self.images[j] for j in other.images))

    def __call__(self, i: int) -> int:
        return self.images[i]

    def inverse(self) -> "Perm":
        inv = [0] * self.degree
        for i, j in enumerate(self.images):
            inv[j] = i
        return Perm(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def cycles(self) -> list[tuple[int, ...]]:
        seen = [False] * self.degree
        out = []
        for start in range(self.degree):
            if seen[start]:
                continue
            cyc = []
            i = start
            while not seen[i]:
                seen[i] = True
                cyc.append(i)
                i = self.images[i]
            out.append(tuple(cyc))
        return out

    def order(self) -> int:
        from math import lcm

        return lcm(*(len(c) for c in self.cycles()))

    def __str__(self) -> str:
        cyc = [c for c in self.cycles() if len(c) > 1]
        if not cyc:
            return "()"
        return "".join("(" + ",".join(str(i + 1) for i in c) + ")" for c in cyc)


def malle_index(g: Perm) -> int:
    """d minus the number of orbits of <g> on the points."""
    return g.degree - len(g.cycles())


def _closure(gens: Sequence, identity, cap: int) -> list:
    seen = {identity}
    order = [identity]
    queue = deque([identity])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = g * x
            if y not in seen:
                seen.add(y)
                order.append(y)
                if len(order) > cap:
                    raise GroupSizeError(f"group closure exceeds cap of {cap} elements")
                queue.append(y)
    return order


@dataclass
class PermGroup:
    degree: int
    generators: tuple[Perm, ...]
    cap: int = DEFAULT_CAP
    _elements: list[Perm] | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        self.generators = tuple(self.generators)
        for g in self.generators:
            if g.degree != self.degree:
                raise DegreeError(f"generator {g} has degree {g.degree}, expected {self.degree}")

    @classmethod
    def from_strings(cls, degree: int, gens: Iterable[str], cap: int = DEFAULT_CAP) -> "PermGroup":
        return cls(degree, tuple(Perm.from_cycles(s, degree) for s in gens), cap)

    def elements(self) -> list[Perm]:
        if self._elements is None:
            self._elements = _closure(self.generators, Perm.identity(self.degree), self.cap)
        return self._elements

    def order(self) -> int:
        return len(self.elements())

    def orbits(self) -> list[set[int]]:
        return _point_orbits(self.degree, self.generators)


def _point_orbits(d: int, gens: Sequence[Perm]) -> list[set[int]]:
    parent = list(range(d))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for g in gens:
        for i, j in enumerate(g.images):
            a, b = find(i), find(j)
            if a != b:
                parent[a] = b
    groups: dict[int, set[int]] = {}
    for i in range(d):
        groups.setdefault(find(i), set()).add(i)
    return list(groups.values())


def is_transitive(G: PermGroup) -> bool:
    return len(G.orbits()) == 1


def min_index_and_a(G: PermGroup) -> tuple[int, Fraction]:
    """Minimal Malle index over non-identity elements and a(G) = 1/ind(G)."""
    best = None
    for g in G.elements():
        if g.is_identity():
            continue
        k = malle_index(g)
        if best is None or k < best:
            best = k
            if k == 1:
                break
    if best is None:
        raise CmWeylError("no non-identity element")
    return best, Fraction(1, best)


# signed permutations ------------------------------------------------------


@dataclass(frozen=True)
class SignedPerm:
    """Element (x, s) of C2^d x| S_d; (x,s)(y,t) = (x + s.y, st), (s.y)_i = y_{s^-1(i)}."""

    flips: tuple[int, ...]
    perm: Perm

    def __post_init__(self) -> None:
        if len(self.flips) != self.perm.degree or any(b not in (0, 1) for b in self.flips):
            raise ValueError("flips must be a 0/1 vector of the permutation's degree")

    @property
    def degree(self) -> int:
        return self.perm.degree

    @classmethod
    def identity(cls, d: int) -> "SignedPerm":
        return cls((0,) * d, Perm.identity(d))

    def _shift(self, y: Sequence[int]) -> tuple[int, ...]:
        # (s.y)_{s(j)} = y_j
        out = [0] * self.degree
        for j, sj in enumerate(self.perm.images):
            out[sj] = y[j]
        return tuple(out)

    def __mul__(self, other: "SignedPerm") -> "SignedPerm":
        if other.degree != self.degree:
            raise DegreeError("degree mismatch")
        moved = self._shift(other.flips)
        return SignedPerm(tuple(a ^ b for a, b in zip(self.flips, moved)), self.perm * other.perm)

    def inverse(self) -> "SignedPerm":
        inv = self.perm.inverse()
        # (x,s)^-1 = (s^-1 . x, s^-1)
        back = SignedPerm((0,) * self.degree, inv)._shift(self.flips)
        return SignedPerm(back, inv)

    def act(self, mask: "CMTypeMask") -> "CMTypeMask":
        if mask.degree != self.degree:
            raise DegreeError(f"mask degree {mask.degree} does not match group degree {self.degree}")
        moved = self._shift(mask.bits)
        return CMTypeMask(tuple(a ^ b for a, b in zip(self.flips, moved)))

    def to_points(self) -> Perm:
        """Permutation of the 2d embeddings: point i is phi_i, point d+i its conjugate."""
        d = self.degree
        images = [0] * (2 * d)
        for i in range(d):
            si = self.perm.images[i]
            for eps in (0, 1):
                target = eps ^ self.flips[si]
                images[i + eps * d] = si + target * d
        return Perm(tuple(images))

    def is_identity(self) -> bool:
        return not any(self.flips) and self.perm.is_identity()


@dataclass(frozen=True)
class CMTypeMask:
    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("mask bits must be 0 or 1")

    @property
    def degree(self) -> int:
        return len(self.bits)

    @classmethod
    def all_masks(cls, d: int) -> list["CMTypeMask"]:
        return [cls(tuple(b)) for b in product((0, 1), repeat=d)]

    @classmethod
    def parse(cls, text: str) -> "CMTypeMask":
        return cls(tuple(int(c) for c in text.strip()))

    def __str__(self) -> str:
        return "".join(map(str, self.bits))


@dataclass
class SignedGroup:
    degree: int
    generators: tuple[SignedPerm, ...]
    cap: int = DEFAULT_CAP
    _elements: list[SignedPerm] | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        self.generators = tuple(self.generators)
        for g in self.generators:
            if g.degree != self.degree:
                raise DegreeError("generator degree mismatch")

    def elements(self) -> list[SignedPerm]:
        if self._elements is None:
            self._elements = _closure(self.generators, SignedPerm.identity(self.degree), self.cap)
        return self._elements

    def order(self) -> int:
        return len(self.elements())


def wreath_c2(G: PermGroup, cap: int | None = None) -> SignedGroup:
    """Generators (e_1, id) and (0, g) for g in G's generators."""
    d = G.degree
    cap = G.cap if cap is None else cap
    if 2**d * G.order() > cap:
        raise GroupSizeError(f"|C2 wr G| = {2**d * G.order()} exceeds cap {cap}")
    e1 = tuple(1 if i == 0 else 0 for i in range(d))
    gens = [SignedPerm(e1, Perm.identity(d))]
    gens += [SignedPerm((0,) * d, g) for g in G.generators]
    return SignedGroup(d, tuple(gens), cap)


def flips_only(d: int) -> SignedGroup:
    """The normal subgroup C2^d (trivial permutation part)."""
    gens = []
    for i in range(d):
        gens.append(SignedPerm(tuple(1 if j == i else 0 for j in range(d)), Perm.identity(d)))
    return SignedGroup(d, tuple(gens))


def is_abelian(H: PermGroup | SignedGroup) -> bool:
    gens = H.generators
    for i, a in enumerate(gens):
        for b in gens[i + 1:]:
            if a * b != b * a:
                return False
    return True


def cm_type_orbit(W: SignedGroup, mask: CMTypeMask) -> int:
    if mask.degree != W.degree:
        raise DegreeError(f"mask degree {mask.degree} does not match group degree {W.degree}")
    seen = {mask}
    queue = deque([mask])
    while queue:
        m = queue.popleft()
        for g in W.generators:
            n = g.act(m)
            if n not in seen:
                seen.add(n)
                queue.append(n)
    return len(seen)


def reflex_degree_check(v: int, G: PermGroup, s_index: int) -> int:
    """2^v [G:S], with [G:S] supplied by the caller."""
    if not 1 <= v <= G.degree:
        raise CmWeylError(f"v={v} out of range 1..{G.degree}")
    if s_index < 1 or G.order() % s_index:
        raise CmWeylError(f"index {s_index} does not divide |G| = {G.order()}")
    return 2**v * s_index


# transitive groups of degree <= 5, Conway-Hulpke-McKay numbering

TRANSITIVE: dict[str, tuple[str, tuple[str, ...]]] = {
    "1T1": ("1", ()),
    "2T1": ("C2", ("(1,2)",)),
    "3T1": ("C3", ("(1,2,3)",)),
    "3T2": ("S3", ("(1,2,3)", "(1,2)")),
    "4T1": ("C4", ("(1,2,3,4)",)),
    "4T2": ("V4", ("(1,2)(3,4)", "(1,3)(2,4)")),
    "4T3": ("D4", ("(1,2,3,4)", "(1,3)")),
    "4T4": ("A4", ("(1,2,3)", "(2,3,4)")),
    "4T5": ("S4", ("(1,2,3,4)", "(1,2)")),
    "5T1": ("C5", ("(1,2,3,4,5)",)),
    "5T2": ("D5", ("(1,2,3,4,5)", "(1,4)(2,3)")),
    "5T3": ("F5", ("(1,2,3,4,5)", "(1,2,4,3)")),
    "5T4": ("A5", ("(1,2,3,4,5)", "(1,2,3)")),
    "5T5": ("S5", ("(1,2,3,4,5)", "(1,2)")),
}

TRANSITIVE_ORDERS = {
    "1T1": 1, "2T1": 2, "3T1": 3, "3T2": 6, "4T1": 4, "4T2": 4, "4T3": 8,
    "4T4": 12, "4T5": 24, "5T1": 5, "5T2": 10, "5T3": 20, "5T4": 60, "5T5": 120,
}


def resolve_label(label: str, degree: int | None = None) -> str:
    """Accept "5T3" or a name like "F5" (with degree) and return the dT label."""
    if label in TRANSITIVE:
        if degree is not None and int(label.split("T")[0]) != degree:
            raise DegreeError(f"label {label} is not of degree {degree}")
        return label
    for lab, (name, _) in TRANSITIVE.items():
        if name.upper() == label.upper() and (degree is None or lab.startswith(f"{degree}T")):
            return lab
    raise CmWeylError(f"unknown transitive group {label!r}" + (f" in degree {degree}" if degree else ""))


def transitive_group(label: str, degree: int | None = None, cap: int = DEFAULT_CAP) -> PermGroup:
    lab = resolve_label(label, degree)
    d = int(lab.split("T")[0])
    return PermGroup.from_strings(d, TRANSITIVE[lab][1], cap)


def group_name(label: str) -> str:
    return TRANSITIVE[resolve_label(label)][0]


def labels_of_degree(d: int) -> list[str]:
    return [lab for lab in TRANSITIVE if lab.startswith(f"{d}T")]
