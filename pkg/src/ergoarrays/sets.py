"""Exact set algebras: rational arcs, cylinder unions, finite subsets.

Every set type has a unique canonical form, so structural equality is set
equality.  Arcs are half-open [a, b) with rational endpoints in [0, 1),
sorted and disjoint, with wraparound split at 0.  Cylinder unions are stored
as a sorted support of coordinates plus the set of admissible symbol rows
over that support, minimized by deleting coordinates the set does not
actually depend on.  Finite subsets are plain frozensets of points.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Mapping

from .util import ResourceCapError, frac_mod1

_MAX_ROWS = 1 << 20  # cap on expanded cylinder rows


# ---------------------------------------------------------------------------
# arcs on the circle [0, 1)


@dataclass(frozen=True)
class ArcUnion:
    """Finite union of half-open arcs [a, b) on the unit circle."""

    arcs: tuple[tuple[Fraction, Fraction], ...]

    @classmethod
    def from_arcs(cls, raw: Iterable[tuple[Fraction | int | str, Fraction | int | str]]) -> "ArcUnion":
        """Build from arbitrary (start, end) pairs; start > end wraps around."""
        pieces: list[tuple[Fraction, Fraction]] = []
        for a, b in raw:
            a, b = Fraction(a), Fraction(b)
            if b - a >= 1:
                return cls.full()
            a, b = frac_mod1(a), frac_mod1(b)
            if a == b:
                continue  # empty piece
            if a < b:
                pieces.append((a, b))
            else:  # wraps through 1: split at 0
                pieces.append((a, Fraction(1)))
                if b > 0:
                    pieces.append((Fraction(0), b))
        return cls._canonical(pieces)

    @classmethod
    def _canonical(cls, pieces: list[tuple[Fraction, Fraction]]) -> "ArcUnion":
        pieces = sorted(p for p in pieces if p[0] < p[1])
        merged: list[tuple[Fraction, Fraction]] = []
        for a, b in pieces:
            if merged and a <= merged[-1][1]:
                la, lb = merged[-1]
                merged[-1] = (la, max(lb, b))
            else:
                merged.append((a, b))
        return cls(tuple(merged))

    @classmethod
    def empty(cls) -> "ArcUnion":
        return cls(())

    @classmethod
    def full(cls) -> "ArcUnion":
        return cls(((Fraction(0), Fraction(1)),))

    def is_empty(self) -> bool:
        return not self.arcs

    def measure(self) -> Fraction:
        return sum((b - a for a, b in self.arcs), Fraction(0))

    def rotate(self, delta: Fraction) -> "ArcUnion":
        """Translate every arc by delta (mod 1)."""
        return ArcUnion.from_arcs([(a + delta, b + delta) for a, b in self.arcs])

    def intersect(self, other: "ArcUnion") -> "ArcUnion":
        out = []
        for a1, b1 in self.arcs:
            for a2, b2 in other.arcs:
                lo, hi = max(a1, a2), min(b1, b2)
                if lo < hi:
                    out.append((lo, hi))
        return ArcUnion._canonical(out)

    def union(self, other: "ArcUnion") -> "ArcUnion":
        return ArcUnion._canonical(list(self.arcs) + list(other.arcs))

    def complement(self) -> "ArcUnion":
        gaps = []
        prev = Fraction(0)
        for a, b in self.arcs:
            if prev < a:
                gaps.append((prev, a))
            prev = b
        if prev < 1:
            gaps.append((prev, Fraction(1)))
        return ArcUnion._canonical(gaps)

    def contains_point(self, x: Fraction) -> bool:
        x = frac_mod1(Fraction(x))
        return any(a <= x < b for a, b in self.arcs)


# ---------------------------------------------------------------------------
# cylinder unions over shift spaces (coords are ints, or int tuples in Z^d)


@dataclass(frozen=True)
class CylinderUnion:
    """Union of cylinders: admissible symbol rows over a coordinate support.

    Canonical form drops every coordinate the set does not depend on, so the
    whole space is (coords=(), rows={()}) and the empty set (coords=(),
    rows=frozenset()).
    """

    coords: tuple[Hashable, ...]
    rows: frozenset[tuple[int, ...]]
    alphabet: int

    @classmethod
    def cylinder(cls, constraints: Mapping[Hashable, int], alphabet: int) -> "CylinderUnion":
        """Single cylinder fixing symbol values at finitely many coordinates."""
        coords = tuple(sorted(constraints))
        for c in coords:
            s = constraints[c]
            if not 0 <= s < alphabet:
                raise ValueError(f"symbol {s} outside alphabet of size {alphabet}")
        row = tuple(constraints[c] for c in coords)
        return cls._canonical(coords, {row}, alphabet)

    @classmethod
    def empty(cls, alphabet: int) -> "CylinderUnion":
        return cls((), frozenset(), alphabet)

    @classmethod
    def full(cls, alphabet: int) -> "CylinderUnion":
        return cls((), frozenset({()}), alphabet)

    @classmethod
    def _canonical(cls, coords, rows, alphabet) -> "CylinderUnion":
        coords = tuple(coords)
        rows = set(rows)
        if not rows:
            return cls((), frozenset(), alphabet)
        # drop coordinates on which membership does not depend
        changed = True
        while changed and coords:
            changed = False
            for pos, _c in enumerate(coords):
                groups: dict[tuple, set[int]] = {}
                for row in rows:
                    key = row[:pos] + row[pos + 1 :]
                    groups.setdefault(key, set()).add(row[pos])
                if all(len(sym) == alphabet for sym in groups.values()):
                    coords = coords[:pos] + coords[pos + 1 :]
                    rows = set(groups)
                    changed = True
                    break
        return cls(tuple(coords), frozenset(rows), alphabet)

    def is_empty(self) -> bool:
        return not self.rows

    def shift(self, offset) -> "CylinderUnion":
        """Rename coordinates by +offset (int, or vector for tuple coords)."""
        if not self.coords:
            return self
        if isinstance(self.coords[0], tuple):
            moved = [tuple(x + o for x, o in zip(c, offset)) for c in self.coords]
        else:
            moved = [c + offset for c in self.coords]
        order = sorted(range(len(moved)), key=lambda i: moved[i])
        coords = tuple(moved[i] for i in order)
        rows = frozenset(tuple(row[i] for i in order) for row in self.rows)
        return CylinderUnion(coords, rows, self.alphabet)

    def _expand_to(self, coords: tuple) -> frozenset[tuple[int, ...]]:
        """Rows of this set over a superset support (exponential in the gap)."""
        missing = [c for c in coords if c not in self.coords]
        n_rows = len(self.rows) * (self.alphabet ** len(missing))
        if n_rows > _MAX_ROWS:
            raise ResourceCapError(
                f"cylinder expansion of {n_rows} rows exceeds cap {_MAX_ROWS}"
            )
        pos = {c: i for i, c in enumerate(self.coords)}
        out = set()
        for base in self.rows:
            rows_acc: list[tuple[int, ...]] = [()]
            for c in coords:
                if c in pos:
                    rows_acc = [r + (base[pos[c]],) for r in rows_acc]
                else:
                    rows_acc = [r + (s,) for r in rows_acc for s in range(self.alphabet)]
            out.update(rows_acc)
        return frozenset(out)

    def intersect(self, other: "CylinderUnion") -> "CylinderUnion":
        if self.alphabet != other.alphabet:
            raise ValueError("alphabet mismatch")
        if self.is_empty() or other.is_empty():
            return CylinderUnion.empty(self.alphabet)
        # fast path: two single cylinders merge coordinatewise
        if len(self.rows) == 1 and len(other.rows) == 1:
            a = dict(zip(self.coords, next(iter(self.rows))))
            for c, s in zip(other.coords, next(iter(other.rows))):
                if a.get(c, s) != s:
                    return CylinderUnion.empty(self.alphabet)
                a[c] = s
            return CylinderUnion.cylinder(a, self.alphabet)
        coords = tuple(sorted(set(self.coords) | set(other.coords)))
        rows = self._expand_to(coords) & other._expand_to(coords)
        return CylinderUnion._canonical(coords, rows, self.alphabet)

    def union(self, other: "CylinderUnion") -> "CylinderUnion":
        if self.alphabet != other.alphabet:
            raise ValueError("alphabet mismatch")
        coords = tuple(sorted(set(self.coords) | set(other.coords)))
        rows = self._expand_to(coords) | other._expand_to(coords)
        return CylinderUnion._canonical(coords, rows, self.alphabet)

    def complement(self) -> "CylinderUnion":
        total = self.alphabet ** len(self.coords)
        if total > _MAX_ROWS:
            raise ResourceCapError("support too wide to complement")
        all_rows = {()}
        for _ in self.coords:
            all_rows = {r + (s,) for r in all_rows for s in range(self.alphabet)}
        return CylinderUnion._canonical(self.coords, all_rows - self.rows, self.alphabet)


# ---------------------------------------------------------------------------
# finite subsets (points of Z_m, or tuples for products)


@dataclass(frozen=True)
class FiniteSubset:
    members: frozenset

    @classmethod
    def of(cls, members: Iterable) -> "FiniteSubset":
        return cls(frozenset(members))

    def is_empty(self) -> bool:
        return not self.members

    def intersect(self, other: "FiniteSubset") -> "FiniteSubset":
        return FiniteSubset(self.members & other.members)

    def union(self, other: "FiniteSubset") -> "FiniteSubset":
        return FiniteSubset(self.members | other.members)


def intersect(a, b):
    """Intersection of two compatible algebra sets."""
    if type(a) is not type(b):
        raise TypeError(f"cannot intersect {type(a).__name__} with {type(b).__name__}")
    return a.intersect(b)


def union(a, b):
    if type(a) is not type(b):
        raise TypeError(f"cannot union {type(a).__name__} with {type(b).__name__}")
    return a.union(b)
