"""Integer-set densities, pattern search a + p_j n + q_j N, and empirical
cylinder frequencies (the finite-window side of the correspondence between
dense integer sets and shift systems).

Sets live in a declared window [lo, hi) and are stored as a big-int bitmask,
so membership tests and the pattern scan are word-parallel; windows up to
10^7 points stay comfortable.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .recurrence import SyndeticReport

Vector = tuple[int, ...]


@dataclass(frozen=True)
class IntegerSet:
    lo: int
    hi: int
    bits: int  # bit t set iff lo + t is a member

    def __post_init__(self):
        if self.hi <= self.lo:
            raise ValueError("window must be nonempty")
        if self.bits < 0 or self.bits >> (self.hi - self.lo):
            raise ValueError("members outside the declared window")

    # -- constructors --------------------------------------------------------

    @classmethod
    def from_members(cls, members: Iterable[int], window: tuple[int, int]) -> "IntegerSet":
        lo, hi = window
        bits = 0
        for m in members:
            if not lo <= m < hi:
                raise ValueError(f"member {m} outside window [{lo}, {hi})")
            bits |= 1 << (m - lo)
        return cls(lo, hi, bits)

    @classmethod
    def from_residue(cls, r: int, mod: int, window: tuple[int, int]) -> "IntegerSet":
        lo, hi = window
        bits = 0
        start = lo + ((r - lo) % mod)
        for m in range(start, hi, mod):
            bits |= 1 << (m - lo)
        return cls(lo, hi, bits)

    @classmethod
    def from_random(cls, density: float, seed: int, window: tuple[int, int]) -> "IntegerSet":
        rng = random.Random(seed)
        lo, hi = window
        bits = 0
        for t in range(hi - lo):
            if rng.random() < density:
                bits |= 1 << t
        return cls(lo, hi, bits)

    @classmethod
    def from_text(cls, text: str, window: tuple[int, int] | None = None) -> "IntegerSet":
        """Newline-delimited integers; the window defaults to [min, max+1)."""
        members = [int(line) for line in text.split() if line.strip()]
        if window is None:
            window = (min(members), max(members) + 1)
        return cls.from_members(members, window)

    # -- queries ---------------------------------------------------------------

    @property
    def window(self) -> tuple[int, int]:
        return (self.lo, self.hi)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def contains(self, x: int) -> bool:
        return self.lo <= x < self.hi and (self.bits >> (x - self.lo)) & 1 == 1

    def members(self) -> Iterable[int]:
        bits, base = self.bits, self.lo
        while bits:
            low = bits & -bits
            yield base + low.bit_length() - 1
            bits ^= low

    def translate(self, t: int) -> "IntegerSet":
        """Members shifted by t inside a window shifted by t."""
        return IntegerSet(self.lo + t, self.hi + t, self.bits)

    def dilate(self, k: int) -> "IntegerSet":
        return IntegerSet.from_members(
            (k * m for m in self.members()), (k * self.lo, k * (self.hi - 1) + 1)
        )

    def prefix_counts(self) -> list[int]:
        counts = [0]
        bits = self.bits
        for t in range(self.hi - self.lo):
            counts.append(counts[-1] + ((bits >> t) & 1))
        return counts


@dataclass(frozen=True)
class LatticeSet:
    """Finite subset of Z^d inside a box prod [lo_i, hi_i)."""

    lo: Vector
    hi: Vector
    members: frozenset[Vector]

    def __post_init__(self):
        for p in self.members:
            if len(p) != len(self.lo) or not all(
                a <= x < b for x, a, b in zip(p, self.lo, self.hi)
            ):
                raise ValueError(f"member {p} outside the box")

    @classmethod
    def from_members(cls, members: Iterable[Vector], lo: Vector, hi: Vector) -> "LatticeSet":
        return cls(tuple(lo), tuple(hi), frozenset(tuple(p) for p in members))

    @property
    def d(self) -> int:
        return len(self.lo)

    def contains(self, p: Vector) -> bool:
        return p in self.members


@dataclass(frozen=True)
class PatternSpec:
    """Translation pattern a + p_j n + q_j N (or a + n z_j + N zhat_j in Z^d)."""

    pairs: tuple[tuple[int, int], ...] = ()
    gamma: tuple[Vector, ...] = ()
    gamma_hat: tuple[Vector, ...] = ()

    def __post_init__(self):
        if self.pairs:
            pairs = tuple((int(p), int(q)) for p, q in self.pairs)
            if pairs[0] != (0, 0):
                pairs = ((0, 0),) + pairs
            object.__setattr__(self, "pairs", pairs)
            if any(p == 0 for p, _ in pairs[1:]):
                raise ValueError("p_j must be nonzero for j >= 1")
        if self.gamma:
            g = tuple(tuple(v) for v in self.gamma)
            gh = tuple(tuple(v) for v in self.gamma_hat)
            object.__setattr__(self, "gamma", g)
            object.__setattr__(self, "gamma_hat", gh)
            if len(g) != len(gh):
                raise ValueError("gamma and gamma_hat must pair up")
            if any(all(x == 0 for x in v) for v in g):
                raise ValueError("gamma vectors must be nonzero")
            if len(set(g)) != len(g):
                raise ValueError("gamma vectors must be distinct")

    @classmethod
    def parse(cls, text: str) -> "PatternSpec":
        """Parse "(0,0),(1,0),(-1,1)" into integer pairs."""
        body = text.replace(" ", "")
        if not body:
            raise ValueError("empty pattern spec")
        pairs = []
        for chunk in body.strip("()").split("),("):
            p, q = chunk.split(",")
            pairs.append((int(p), int(q)))
        return cls(pairs=tuple(pairs))


@dataclass(frozen=True)
class DensityResult:
    density: Fraction
    window: tuple[int, ...] | tuple[Vector, Vector]
    size: int


def upper_density(s: IntegerSet | LatticeSet, window_sizes: Sequence[int]) -> DensityResult:
    """Best sliding-window density over the given window sizes."""
    if isinstance(s, IntegerSet):
        counts = s.prefix_counts()
        length = s.hi - s.lo
        best = None
        for w in window_sizes:
            if not 1 <= w <= length:
                raise ValueError(f"window size {w} does not fit [{s.lo}, {s.hi})")
            for a in range(length - w + 1):
                d = Fraction(counts[a + w] - counts[a], w)
                if best is None or d > best[0]:
                    best = (d, (s.lo + a, s.lo + a + w), w)
        return DensityResult(*best)
    best = None
    for w in window_sizes:
        if any(w > b - a for a, b in zip(s.lo, s.hi)):
            raise ValueError(f"window size {w} does not fit the box")
        ranges = [range(a, b - w + 1) for a, b in zip(s.lo, s.hi)]
        for corner in _product(ranges):
            cnt = sum(
                1
                for p in s.members
                if all(c <= x < c + w for x, c in zip(p, corner))
            )
            d = Fraction(cnt, w ** s.d)
            if best is None or d > best[0]:
                hi = tuple(c + w for c in corner)
                best = (d, (tuple(corner), hi), w)
    return DensityResult(*best)


def _product(ranges):
    if not ranges:
        yield ()
        return
    for head in ranges[0]:
        for rest in _product(ranges[1:]):
            yield (head,) + rest


@dataclass(frozen=True)
class PatternCount:
    N: int
    count: int
    witnesses: tuple[tuple[int, int | Vector], ...]
    scanned_a: tuple  # (min feasible a, max feasible a) over counted n


def pattern_count(
    s: IntegerSet, spec: PatternSpec, N: int, max_witnesses: int = 10
) -> PatternCount:
    """Count n in [0, N] such that some a places a + p_j n + q_j N in the set
    for every j; a is scanned over the largest interval keeping all l+1
    translated points inside the window."""
    if not spec.pairs:
        raise ValueError("pattern spec carries no (p, q) pairs")
    lo, hi, bits = s.lo, s.hi, s.bits
    width = hi - lo
    count = 0
    witnesses = []
    a_lo_seen, a_hi_seen = None, None
    any_feasible = False
    for n in range(N + 1):
        offsets = [p * n + q * N for p, q in spec.pairs]
        t_lo = max(0, -min(offsets))
        t_hi = width - max(0, max(offsets))
        if t_lo >= t_hi:
            continue
        any_feasible = True
        a_lo_seen = lo + t_lo if a_lo_seen is None else min(a_lo_seen, lo + t_lo)
        a_hi_seen = lo + t_hi if a_hi_seen is None else max(a_hi_seen, lo + t_hi)
        mask = (1 << t_hi) - (1 << t_lo)
        hits = bits
        for o in offsets:
            hits &= bits >> o if o >= 0 else bits << -o
            hits &= mask
            if not hits:
                break
        if hits:
            count += 1
            if len(witnesses) < max_witnesses:
                witnesses.append((n, lo + (hits & -hits).bit_length() - 1))
    if not any_feasible:
        raise ValueError(
            f"no feasible a for any n <= {N}: window [{lo}, {hi}) cannot hold "
            f"offsets spanning up to {max(abs(p) + abs(q) for p, q in spec.pairs) * N}"
        )
    return PatternCount(N, count, tuple(witnesses), (a_lo_seen, a_hi_seen))


def lattice_pattern_count(
    s: LatticeSet, spec: PatternSpec, N: int, max_witnesses: int = 10
) -> PatternCount:
    """d-dimensional analog: count n in [0, N] with a + n z_j + N zhat_j in
    the set for all j (and a itself a member)."""
    if not spec.gamma:
        raise ValueError("pattern spec carries no lattice vectors")
    count = 0
    witnesses = []
    for n in range(N + 1):
        offs = [
            tuple(n * z + N * zh for z, zh in zip(zv, hv))
            for zv, hv in zip(spec.gamma, spec.gamma_hat)
        ]
        found = None
        for a in s.members:
            if all(tuple(x + o for x, o in zip(a, off)) in s.members for off in offs):
                found = a
                break
        if found is not None:
            count += 1
            if len(witnesses) < max_witnesses:
                witnesses.append((n, found))
    return PatternCount(N, count, tuple(witnesses), (None, None))


def syndetic_pattern_report(
    s: IntegerSet | LatticeSet,
    spec: PatternSpec,
    n_max: int,
    eps: Fraction | str = "auto",
) -> SyndeticReport:
    """N with pattern_count(N) >= eps*N, reported as a window certificate."""
    counter = pattern_count if isinstance(s, IntegerSet) else lattice_pattern_count
    ratios = {}
    for N in range(1, n_max + 1):
        ratios[N] = Fraction(counter(s, spec, N).count, N)
    if eps == "auto":
        tail = [ratios[N] for N in ratios if N > n_max // 2]
        peak = max(tail)
        if peak == 0:
            return SyndeticReport(None, (), None, "not-found", None, n_max)
        eps = peak / 2
    eps = Fraction(eps)
    members = tuple(N for N in sorted(ratios) if ratios[N] >= eps)
    if not members:
        return SyndeticReport(eps, (), None, "not-found", None, n_max)
    gaps = [b - a for a, b in zip(members, members[1:])]
    return SyndeticReport(
        eps,
        members,
        max(gaps) if gaps else None,
        "syndetic-in-window",
        min(ratios[N] for N in members),
        n_max,
    )


def empirical_cylinder_measure(
    s: IntegerSet,
    window: tuple[int, int] | None = None,
    cylinders: Sequence[Mapping[int, int]] = (),
) -> dict[tuple[tuple[int, int], ...], Fraction]:
    """Frequency of 0/1 patterns along the indicator sequence of the set.

    Each cylinder maps offsets to required bits; its frequency is the share
    of placements t in the window with indicator(t + offset) == bit for all
    constraints.  The cylinder {0: 1} recovers the window density exactly.
    """
    lo, hi = window if window is not None else s.window
    if not (s.lo <= lo < hi <= s.hi):
        raise ValueError("window must sit inside the set's declared window")
    length = hi - lo
    base = (s.bits >> (lo - s.lo)) & ((1 << length) - 1)
    out = {}
    for cyl in cylinders:
        if not cyl:
            raise ValueError("empty cylinder")
        offsets = sorted(cyl)
        span = offsets[-1] - offsets[0] + 1
        if span > length // 2:
            raise ValueError(
                f"cylinder span {span} too large for window of length {length}"
            )
        placements = length - (offsets[-1] - offsets[0])
        mask = (1 << placements) - 1
        hits = mask
        for o in offsets:
            track = base >> (o - offsets[0])
            if cyl[o] not in (0, 1):
                raise ValueError("cylinder bits must be 0 or 1")
            if cyl[o] == 0:
                track = ~track
            hits &= track & mask
        key = tuple(sorted(cyl.items()))
        out[key] = Fraction(hits.bit_count(), placements)
    return out
