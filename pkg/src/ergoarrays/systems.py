"""Concrete measure-preserving systems in two capability tiers.

EXACT systems answer measure queries with exact rationals on a closed set
algebra and support T^{-k} for every integer k.  SAMPLED systems supply
forward (and, when invertible, backward) orbit evaluation plus deterministic
measure-distributed sampling; they feed the Monte Carlo paths.

All exact systems implement: full_set, empty_set, measure, preimage(S, k),
complement, random_set(rng).  Shift-type and lattice systems additionally
implement translate_preimage(S, v) for commuting-family actions.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .sets import ArcUnion, CylinderUnion, FiniteSubset
from .util import frac_mod1, mix64, parse_fraction

Vector = tuple[int, ...]


# ---------------------------------------------------------------------------
# exact tier


class ExactSystem:
    """Marker base; concrete systems are frozen dataclasses."""

    is_exact = True
    independent_coords = False  # True when disjoint coordinate supports are independent


@dataclass(frozen=True)
class CyclicRotation(ExactSystem):
    """Rotation x -> x + step on Z_m with normalized counting measure."""

    modulus: int
    step: int = 1

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be >= 1")

    def point_set(self, members: Iterable[int]) -> FiniteSubset:
        return FiniteSubset.of(m % self.modulus for m in members)

    def full_set(self) -> FiniteSubset:
        return FiniteSubset.of(range(self.modulus))

    def empty_set(self) -> FiniteSubset:
        return FiniteSubset.of(())

    def measure(self, S: FiniteSubset) -> Fraction:
        return Fraction(len(S.members), self.modulus)

    def preimage(self, S: FiniteSubset, k: int) -> FiniteSubset:
        delta = (k * self.step) % self.modulus
        return FiniteSubset.of((x - delta) % self.modulus for x in S.members)

    def translate_preimage(self, S: FiniteSubset, v: int | Vector) -> FiniteSubset:
        (v,) = v if isinstance(v, tuple) else (v,)
        return FiniteSubset.of((x - v) % self.modulus for x in S.members)

    def complement(self, S: FiniteSubset) -> FiniteSubset:
        return FiniteSubset(self.full_set().members - S.members)

    def random_set(self, rng: random.Random) -> FiniteSubset:
        return FiniteSubset.of(x for x in range(self.modulus) if rng.random() < 0.5)

    def sample_point(self, seed: int, idx: int) -> int:
        return mix64(seed, idx) % self.modulus

    def point_in(self, x: int, S: FiniteSubset) -> bool:
        return x % self.modulus in S.members


@dataclass(frozen=True)
class CircleRotation(ExactSystem):
    """Rotation of [0, 1) by an exact rational angle; sets are arc unions."""

    angle: Fraction

    def __post_init__(self):
        object.__setattr__(self, "angle", frac_mod1(Fraction(self.angle)))

    def arc(self, a, b) -> ArcUnion:
        return ArcUnion.from_arcs([(Fraction(a), Fraction(b))])

    def full_set(self) -> ArcUnion:
        return ArcUnion.full()

    def empty_set(self) -> ArcUnion:
        return ArcUnion.empty()

    def measure(self, S: ArcUnion) -> Fraction:
        return S.measure()

    def preimage(self, S: ArcUnion, k: int) -> ArcUnion:
        return S.rotate(-k * self.angle)

    def complement(self, S: ArcUnion) -> ArcUnion:
        return S.complement()

    def random_set(self, rng: random.Random) -> ArcUnion:
        arcs = []
        for _ in range(rng.randint(1, 3)):
            a = Fraction(rng.randint(0, 48), 48)
            b = a + Fraction(rng.randint(1, 16), 48)
            arcs.append((a, b))
        return ArcUnion.from_arcs(arcs)

    def sample_point(self, seed: int, idx: int) -> Fraction:
        hi, lo = mix64(seed, idx, 0), mix64(seed, idx, 1)
        return Fraction((hi << 64) | lo, 1 << 128)

    def point_in(self, x: Fraction, S: ArcUnion) -> bool:
        return S.contains_point(x)


def _parse_matrix(rows: Sequence[Sequence]) -> tuple[tuple[Fraction, ...], ...]:
    out = []
    for row in rows:
        out.append(tuple(Fraction(x) if not isinstance(x, str) else parse_fraction(x) for x in row))
    return tuple(out)


def _stationary_of(matrix: tuple[tuple[Fraction, ...], ...]) -> tuple[Fraction, ...]:
    """Unique stationary row vector of a stochastic matrix, exact."""
    s = len(matrix)
    # unknowns x_0..x_{s-1}: s-1 balance equations plus normalization
    rows: list[list[Fraction]] = []
    for i in range(s - 1):
        rows.append([matrix[j][i] - (1 if i == j else 0) for j in range(s)] + [Fraction(0)])
    rows.append([Fraction(1)] * s + [Fraction(1)])
    # Gaussian elimination with exact pivoting
    n = len(rows)
    col = 0
    for r in range(n):
        piv = next((rr for rr in range(r, n) if rows[rr][col] != 0), None)
        if piv is None:
            raise ValueError("chain has no unique stationary distribution")
        rows[r], rows[piv] = rows[piv], rows[r]
        pivval = rows[r][col]
        rows[r] = [v / pivval for v in rows[r]]
        for rr in range(n):
            if rr != r and rows[rr][col] != 0:
                f = rows[rr][col]
                rows[rr] = [a - f * b for a, b in zip(rows[rr], rows[r])]
        col += 1
    pi = tuple(rows[i][s] for i in range(s))
    if any(p < 0 for p in pi):
        raise ValueError("chain has no unique stationary distribution")
    return pi


@dataclass(frozen=True)
class BernoulliShift(ExactSystem):
    """Left shift on alphabet^Z with an i.i.d. product measure."""

    probs: tuple[Fraction, ...]

    independent_coords = True

    def __post_init__(self):
        probs = tuple(Fraction(p) for p in self.probs)
        object.__setattr__(self, "probs", probs)
        if sum(probs) != 1 or any(p < 0 for p in probs):
            raise ValueError("probabilities must be nonnegative and sum to 1")

    @classmethod
    def uniform(cls, symbols: int = 2) -> "BernoulliShift":
        return cls(tuple(Fraction(1, symbols) for _ in range(symbols)))

    @property
    def alphabet(self) -> int:
        return len(self.probs)

    def cylinder(self, constraints: Mapping[int, int]) -> CylinderUnion:
        return CylinderUnion.cylinder(constraints, self.alphabet)

    def full_set(self) -> CylinderUnion:
        return CylinderUnion.full(self.alphabet)

    def empty_set(self) -> CylinderUnion:
        return CylinderUnion.empty(self.alphabet)

    def measure(self, S: CylinderUnion) -> Fraction:
        total = Fraction(0)
        for row in S.rows:
            p = Fraction(1)
            for sym in row:
                p *= self.probs[sym]
            total += p
        return total

    def preimage(self, S: CylinderUnion, k: int) -> CylinderUnion:
        return S.shift(k)

    def translate_preimage(self, S: CylinderUnion, v: int | Vector) -> CylinderUnion:
        (v,) = v if isinstance(v, tuple) else (v,)
        return S.shift(v)

    def complement(self, S: CylinderUnion) -> CylinderUnion:
        return S.complement()

    def random_set(self, rng: random.Random) -> CylinderUnion:
        constraints = {
            rng.randint(-6, 6): rng.randrange(self.alphabet)
            for _ in range(rng.randint(1, 3))
        }
        return self.cylinder(constraints)

    def sample_point(self, seed: int, idx: int) -> "LazySequence":
        return LazySequence(seed, idx, self.probs)

    def point_in(self, x: "LazySequence", S: CylinderUnion) -> bool:
        row = tuple(x.symbol(c) for c in S.coords)
        return row in S.rows


@dataclass(frozen=True)
class MarkovShift(ExactSystem):
    """Left shift with the stationary Markov measure of a stochastic matrix."""

    matrix: tuple[tuple[Fraction, ...], ...]
    stationary: tuple[Fraction, ...] = field(init=False)

    def __post_init__(self):
        matrix = _parse_matrix(self.matrix)
        object.__setattr__(self, "matrix", matrix)
        for row in matrix:
            if sum(row) != 1 or any(p < 0 for p in row):
                raise ValueError("matrix rows must be stochastic")
        object.__setattr__(self, "stationary", _stationary_of(matrix))
        object.__setattr__(self, "_powers", {0: _identity(len(matrix)), 1: matrix})

    @property
    def alphabet(self) -> int:
        return len(self.matrix)

    def power(self, t: int) -> tuple[tuple[Fraction, ...], ...]:
        cache = self._powers
        if t not in cache:
            cache[t] = _mat_mul(self.power(t - 1), self.matrix)
        return cache[t]

    def cylinder(self, constraints: Mapping[int, int]) -> CylinderUnion:
        return CylinderUnion.cylinder(constraints, self.alphabet)

    def full_set(self) -> CylinderUnion:
        return CylinderUnion.full(self.alphabet)

    def empty_set(self) -> CylinderUnion:
        return CylinderUnion.empty(self.alphabet)

    def measure(self, S: CylinderUnion) -> Fraction:
        total = Fraction(0)
        for row in S.rows:
            if not row:
                return Fraction(1)
            p = self.stationary[row[0]]
            for t in range(len(row) - 1):
                gap = S.coords[t + 1] - S.coords[t]
                p *= self.power(gap)[row[t]][row[t + 1]]
            total += p
        return total

    def preimage(self, S: CylinderUnion, k: int) -> CylinderUnion:
        return S.shift(k)

    def translate_preimage(self, S: CylinderUnion, v: int | Vector) -> CylinderUnion:
        (v,) = v if isinstance(v, tuple) else (v,)
        return S.shift(v)

    def complement(self, S: CylinderUnion) -> CylinderUnion:
        return S.complement()

    def random_set(self, rng: random.Random) -> CylinderUnion:
        constraints = {
            rng.randint(-5, 5): rng.randrange(self.alphabet)
            for _ in range(rng.randint(1, 3))
        }
        return self.cylinder(constraints)


def _identity(s: int):
    return tuple(
        tuple(Fraction(1) if i == j else Fraction(0) for j in range(s)) for i in range(s)
    )


def _mat_mul(a, b):
    s = len(a)
    return tuple(
        tuple(sum((a[i][t] * b[t][j] for t in range(s)), Fraction(0)) for j in range(s))
        for i in range(s)
    )


@dataclass(frozen=True)
class CyclicLattice(ExactSystem):
    """Product of cyclic rotations on Z_{m_1} x ... x Z_{m_d}.

    Serves both as the "product" exact kind (T rotates every factor by its
    step) and as the point space for lattice actions on (Z_m)^d.
    """

    moduli: tuple[int, ...]
    steps: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.steps is None:
            object.__setattr__(self, "steps", tuple(1 for _ in self.moduli))
        if len(self.steps) != len(self.moduli):
            raise ValueError("steps and moduli lengths differ")

    @property
    def d(self) -> int:
        return len(self.moduli)

    def _wrap(self, p: Vector) -> Vector:
        return tuple(x % m for x, m in zip(p, self.moduli))

    def point_set(self, members: Iterable[Vector]) -> FiniteSubset:
        return FiniteSubset.of(self._wrap(p) for p in members)

    def full_set(self) -> FiniteSubset:
        pts = [()]
        for m in self.moduli:
            pts = [p + (x,) for p in pts for x in range(m)]
        return FiniteSubset.of(pts)

    def empty_set(self) -> FiniteSubset:
        return FiniteSubset.of(())

    def space_size(self) -> int:
        return math.prod(self.moduli)

    def measure(self, S: FiniteSubset) -> Fraction:
        return Fraction(len(S.members), self.space_size())

    def preimage(self, S: FiniteSubset, k: int) -> FiniteSubset:
        v = tuple(k * s for s in self.steps)
        return self.translate_preimage(S, v)

    def translate_preimage(self, S: FiniteSubset, v: Vector) -> FiniteSubset:
        return FiniteSubset.of(
            self._wrap(tuple(x - dv for x, dv in zip(p, v))) for p in S.members
        )

    def complement(self, S: FiniteSubset) -> FiniteSubset:
        return FiniteSubset(self.full_set().members - S.members)

    def random_set(self, rng: random.Random) -> FiniteSubset:
        return FiniteSubset.of(p for p in self.full_set().members if rng.random() < 0.5)


@dataclass(frozen=True)
class BernoulliLattice(ExactSystem):
    """Z^d of shifts on {0,..,a-1}^{Z^d} with an i.i.d. product measure."""

    probs: tuple[Fraction, ...]
    d: int

    independent_coords = True

    def __post_init__(self):
        probs = tuple(Fraction(p) for p in self.probs)
        object.__setattr__(self, "probs", probs)
        if sum(probs) != 1 or any(p < 0 for p in probs):
            raise ValueError("probabilities must be nonnegative and sum to 1")

    @property
    def alphabet(self) -> int:
        return len(self.probs)

    def cylinder(self, constraints: Mapping[Vector, int]) -> CylinderUnion:
        for c in constraints:
            if len(c) != self.d:
                raise ValueError(f"coordinate {c} is not {self.d}-dimensional")
        return CylinderUnion.cylinder(constraints, self.alphabet)

    def full_set(self) -> CylinderUnion:
        return CylinderUnion.full(self.alphabet)

    def empty_set(self) -> CylinderUnion:
        return CylinderUnion.empty(self.alphabet)

    def measure(self, S: CylinderUnion) -> Fraction:
        total = Fraction(0)
        for row in S.rows:
            p = Fraction(1)
            for sym in row:
                p *= self.probs[sym]
            total += p
        return total

    def preimage(self, S: CylinderUnion, k: int) -> CylinderUnion:
        """T^{-k}S for the diagonal shift T = translation by (1, ..., 1)."""
        return S.shift(tuple(k for _ in range(self.d)))

    def translate_preimage(self, S: CylinderUnion, v: Vector) -> CylinderUnion:
        return S.shift(v)

    def complement(self, S: CylinderUnion) -> CylinderUnion:
        return S.complement()

    def random_set(self, rng: random.Random) -> CylinderUnion:
        constraints = {}
        for _ in range(rng.randint(1, 3)):
            coord = tuple(rng.randint(-4, 4) for _ in range(self.d))
            constraints[coord] = rng.randrange(self.alphabet)
        return self.cylinder(constraints)

    def sample_point(self, seed: int, idx: int) -> "LazySequence":
        return LazySequence(seed, idx, self.probs)

    def point_in(self, x: "LazySequence", S: CylinderUnion) -> bool:
        row = tuple(x.symbol(c) for c in S.coords)
        return row in S.rows


@dataclass(frozen=True)
class RelabeledSystem(ExactSystem):
    """Isomorphic copy of a finite-point system under a point bijection."""

    base: ExactSystem
    relabel: tuple[tuple[object, object], ...]  # pairs (base point, new point)

    def __post_init__(self):
        fwd = dict(self.relabel)
        back = {v: k for k, v in fwd.items()}
        if len(back) != len(fwd):
            raise ValueError("relabeling must be a bijection")
        base_pts = self.base.full_set().members
        if set(fwd) != set(base_pts):
            raise ValueError("relabeling must cover the whole base space")
        object.__setattr__(self, "_fwd", fwd)
        object.__setattr__(self, "_back", back)

    def _pull(self, S: FiniteSubset) -> FiniteSubset:
        return FiniteSubset.of(self._back[p] for p in S.members)

    def _push(self, S: FiniteSubset) -> FiniteSubset:
        return FiniteSubset.of(self._fwd[p] for p in S.members)

    def point_set(self, members: Iterable) -> FiniteSubset:
        return FiniteSubset.of(members)

    def full_set(self) -> FiniteSubset:
        return self._push(self.base.full_set())

    def empty_set(self) -> FiniteSubset:
        return FiniteSubset.of(())

    def measure(self, S: FiniteSubset) -> Fraction:
        return self.base.measure(self._pull(S))

    def preimage(self, S: FiniteSubset, k: int) -> FiniteSubset:
        return self._push(self.base.preimage(self._pull(S), k))

    def complement(self, S: FiniteSubset) -> FiniteSubset:
        return FiniteSubset(self.full_set().members - S.members)

    def random_set(self, rng: random.Random) -> FiniteSubset:
        return self._push(self.base.random_set(rng))


@dataclass(frozen=True)
class LazySequence:
    """Deterministic lazily-sampled point of a product shift space.

    The symbol at a coordinate is a pure function of (seed, index, coord),
    so query order never matters.
    """

    seed: int
    idx: int
    probs: tuple[Fraction, ...]

    def symbol(self, coord) -> int:
        parts = coord if isinstance(coord, tuple) else (coord,)
        u = Fraction(mix64(self.seed, self.idx, 7, *(c & 0xFFFFFFFFFFFFFFFF for c in parts)), 1 << 64)
        acc = Fraction(0)
        for s, p in enumerate(self.probs):
            acc += p
            if u < acc:
                return s
        return len(self.probs) - 1


# ---------------------------------------------------------------------------
# commuting families


@dataclass(frozen=True)
class LatticeAction:
    """Commuting translations T_j, That_j given by integer vectors.

    ``system`` must expose translate_preimage(S, v) and measure(S); the
    generator vectors z_j must be pairwise distinct and nonzero (the hatted
    vectors are unconstrained).
    """

    system: ExactSystem
    z: tuple[Vector, ...]
    zhat: tuple[Vector, ...]

    def __post_init__(self):
        z = tuple(tuple(v) for v in self.z)
        zhat = tuple(tuple(v) for v in self.zhat)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "zhat", zhat)
        if len(z) != len(zhat):
            raise ValueError("need as many hatted vectors as unhatted ones")
        if not z:
            raise ValueError("need at least one generator pair")
        dims = {len(v) for v in z} | {len(v) for v in zhat}
        if len(dims) != 1:
            raise ValueError("generator vectors must share one dimension")
        if any(all(x == 0 for x in v) for v in z):
            raise ValueError("z vectors must be nonzero")
        if len(set(z)) != len(z):
            raise ValueError("z vectors must be pairwise distinct")

    @property
    def ell(self) -> int:
        return len(self.z)

    @property
    def d(self) -> int:
        return len(self.z[0])

    def shift_vector(self, j: int, n: int, N: int) -> Vector:
        """Exponent vector of T_j^n That_j^N; j = 0 is the identity pair."""
        if j == 0:
            return tuple(0 for _ in range(self.d))
        zj, hj = self.z[j - 1], self.zhat[j - 1]
        return tuple(n * a + N * b for a, b in zip(zj, hj))

    def preimage_set(self, S, v: Vector):
        return self.system.translate_preimage(S, v)

    def measure(self, S) -> Fraction:
        return self.system.measure(S)

    def commutes(self, trial_sets: Sequence | None = None) -> bool:
        """Verify pairwise commutativity on a generating family of sets."""
        sets = list(trial_sets) if trial_sets is not None else []
        if not sets:
            rng = random.Random(7)
            sets = [self.system.random_set(rng) for _ in range(5)]
        vecs = list(self.z) + list(self.zhat)
        for a in vecs:
            for b in vecs:
                for S in sets:
                    ab = self.preimage_set(self.preimage_set(S, a), b)
                    ba = self.preimage_set(self.preimage_set(S, b), a)
                    if ab != ba:
                        return False
        return True


def build_lattice_action(
    system: ExactSystem,
    z: Sequence[Sequence[int] | int],
    zhat: Sequence[Sequence[int] | int],
) -> LatticeAction:
    """Normalize integer generators to vectors and validate the action."""
    norm = lambda v: (v,) if isinstance(v, int) else tuple(v)
    action = LatticeAction(system, tuple(norm(v) for v in z), tuple(norm(v) for v in zhat))
    if not action.commutes():
        raise ValueError("generators do not commute")
    return action


# ---------------------------------------------------------------------------
# sampled tier


class SampledSystem:
    is_exact = False
    invertible = False


@dataclass(frozen=True)
class IrrationalRotation(SampledSystem):
    """Circle rotation by a fixed-point dyadic approximation of an
    irrational angle (default 128 fractional bits)."""

    angle_fp: int
    bits: int = 128

    invertible = True

    @classmethod
    def from_float(cls, alpha: float, bits: int = 128) -> "IrrationalRotation":
        return cls(round(Fraction(alpha) * (1 << bits)) % (1 << bits), bits)

    @classmethod
    def sqrt2_minus_1(cls, bits: int = 128) -> "IrrationalRotation":
        fp = math.isqrt(2 << (2 * bits)) - (1 << bits)
        return cls(fp, bits)

    @property
    def angle(self) -> Fraction:
        return Fraction(self.angle_fp, 1 << self.bits)

    def forward(self, x: Fraction) -> Fraction:
        return frac_mod1(x + self.angle)

    def backward(self, x: Fraction) -> Fraction:
        return frac_mod1(x - self.angle)

    def orbit(self, x: Fraction, k: int) -> Fraction:
        return frac_mod1(x + k * self.angle)

    def sample_point(self, seed: int, idx: int) -> Fraction:
        need = self.bits
        words = []
        for w in range((need + 63) // 64):
            words.append(mix64(seed, idx, w))
        val = 0
        for w in words:
            val = (val << 64) | w
        return Fraction(val % (1 << need), 1 << need)

    def point_in(self, x: Fraction, S: ArcUnion) -> bool:
        return S.contains_point(x)


@dataclass(frozen=True)
class GaussMap(SampledSystem):
    """x -> 1/x mod 1 on (0, 1) with the density 1/((1+x) ln 2).

    Forward-only: negative orbit times are rejected.
    """

    bits: int = 64

    invertible = False

    def forward(self, x: Fraction) -> Fraction:
        if x == 0:
            return Fraction(0)
        return frac_mod1(1 / Fraction(x))

    def orbit(self, x: Fraction, k: int) -> Fraction:
        if k < 0:
            raise ValueError("the Gauss map is not invertible: k must be >= 0")
        for _ in range(k):
            x = self.forward(x)
        return x

    def density(self, x: float) -> float:
        return 1.0 / ((1.0 + x) * math.log(2.0))

    def sample_point(self, seed: int, idx: int) -> Fraction:
        # inverse CDF of the invariant measure: F(x) = log2(1+x)
        u = mix64(seed, idx) / 2**64
        x = 2.0**u - 1.0
        return Fraction(round(x * (1 << self.bits)), 1 << self.bits)

    def point_in(self, x: Fraction, S: ArcUnion) -> bool:
        return S.contains_point(x)


@dataclass(frozen=True)
class SkewProduct(SampledSystem):
    """T(y, z) = (S y, sigma(y) z) over a sampled base system.

    ``cocycle(y, z)`` returns the new fiber point; an optional
    ``cocycle_inv`` makes the product invertible when the base is.
    """

    base: SampledSystem
    cocycle: Callable
    cocycle_inv: Callable | None = None

    @property
    def invertible(self) -> bool:  # type: ignore[override]
        return self.base.invertible and self.cocycle_inv is not None

    def forward(self, point):
        y, z = point
        return (self.base.forward(y), self.cocycle(y, z))

    def backward(self, point):
        if not self.invertible:
            raise ValueError("skew product is not invertible")
        y, z = point
        y0 = self.base.backward(y)
        return (y0, self.cocycle_inv(y0, z))

    def orbit(self, point, k: int):
        if k >= 0:
            for _ in range(k):
                point = self.forward(point)
        else:
            for _ in range(-k):
                point = self.backward(point)
        return point

    def sample_point(self, seed: int, idx: int):
        y = self.base.sample_point(seed, idx)
        z = self.base.sample_point(mix64(seed, 0xF1BE), idx)
        return (y, z)


@dataclass(frozen=True)
class UserSystem(SampledSystem):
    """User-supplied maps and sampler; forward-only unless backward given."""

    forward_map: Callable
    backward_map: Callable | None = None
    sampler: Callable | None = None  # (seed, idx) -> point

    @property
    def invertible(self) -> bool:  # type: ignore[override]
        return self.backward_map is not None

    def forward(self, x):
        return self.forward_map(x)

    def backward(self, x):
        if self.backward_map is None:
            raise ValueError("system is not invertible")
        return self.backward_map(x)

    def orbit(self, x, k: int):
        if k >= 0:
            for _ in range(k):
                x = self.forward(x)
        else:
            for _ in range(-k):
                x = self.backward(x)
        return x

    def sample_point(self, seed: int, idx: int):
        if self.sampler is None:
            raise ValueError("system has no sampler")
        return self.sampler(seed, idx)


def orbit_eval(sys, x, k: int):
    """T^k x; k may be negative only on invertible systems."""
    if k < 0 and not getattr(sys, "invertible", False):
        raise ValueError("negative orbit time on a non-invertible system")
    return sys.orbit(x, k)


# ---------------------------------------------------------------------------
# JSON descriptors ({"kind": ..., "params": {...}})


def build_system(descriptor: Mapping):
    kind = descriptor.get("kind")
    params = descriptor.get("params", {})
    unknown = set(descriptor) - {"kind", "params"}
    if unknown:
        raise ValueError(f"unknown descriptor fields: {sorted(unknown)}")
    if kind == "cyclic-rotation":
        return CyclicRotation(int(params["modulus"]), int(params.get("step", 1)))
    if kind == "circle-rotation-rational":
        return CircleRotation(parse_fraction(str(params["angle"])))
    if kind == "bernoulli-shift":
        return BernoulliShift(tuple(parse_fraction(str(p)) for p in params["probs"]))
    if kind == "markov-shift":
        return MarkovShift(_parse_matrix(params["matrix"]))
    if kind == "product":
        return CyclicLattice(
            tuple(int(m) for m in params["moduli"]),
            tuple(int(s) for s in params["steps"]) if "steps" in params else None,
        )
    if kind == "bernoulli-lattice":
        return BernoulliLattice(
            tuple(parse_fraction(str(p)) for p in params["probs"]), int(params["d"])
        )
    if kind == "relabeled":
        base = build_system(params["base"])
        pairs = tuple((p, q) for p, q in params["relabel"])
        return RelabeledSystem(base, pairs)
    if kind == "circle-rotation-irrational":
        bits = int(params.get("bits", 128))
        if params.get("angle") == "sqrt2-1":
            return IrrationalRotation.sqrt2_minus_1(bits)
        return IrrationalRotation.from_float(float(params["angle"]), bits)
    if kind == "gauss-map":
        return GaussMap()
    raise ValueError(f"unknown system kind {kind!r}")
