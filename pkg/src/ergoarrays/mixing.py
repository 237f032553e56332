"""Mixing coefficients of finite-state Markov shifts, higher-order mixing
gaps, and the Cantor-like spectral level sets behind slow nN-averages.

The alpha coefficient is maximized exactly: over a finite window algebra the
extremal events depend only on the boundary coordinate (grouping atoms by
their end state leaves a bilinear form over boxes, maximized at vertices),
so the supremum reduces to subsets of states.  For a Markov measure this
value is the same for every window horizon.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .util import ResourceCapError, dist_to_int, lt_one_over_two_pi, parse_fraction

Matrix = tuple[tuple[Fraction, ...], ...]


@dataclass(frozen=True)
class MarkovChainModel:
    """Stationary finite-state Markov chain with exact rational transitions."""

    matrix: Matrix
    stationary: tuple[Fraction, ...] = field(init=False)

    def __post_init__(self):
        from .systems import _parse_matrix, _stationary_of

        matrix = _parse_matrix(self.matrix)
        for row in matrix:
            if sum(row) != 1 or any(p < 0 for p in row):
                raise ValueError("matrix rows must be stochastic")
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "stationary", _stationary_of(matrix))
        object.__setattr__(self, "_powers", {0: _eye(len(matrix)), 1: matrix})

    @classmethod
    def iid(cls, probs: Sequence) -> "MarkovChainModel":
        probs = tuple(Fraction(p) for p in probs)
        return cls(tuple(probs for _ in probs))

    @classmethod
    def two_state(cls, stay: Fraction) -> "MarkovChainModel":
        stay = Fraction(stay)
        move = 1 - stay
        return cls(((stay, move), (move, stay)))

    @property
    def states(self) -> int:
        return len(self.matrix)

    def power(self, t: int) -> Matrix:
        cache = self._powers
        if t not in cache:
            half = cache.get(t - 1)
            if half is None:
                half = self.power(t - 1)
            cache[t] = _mul(half, self.matrix)
        return cache[t]

    def path_measure(self, constraints: Mapping[int, int]) -> Fraction:
        """mu of the cylinder fixing symbols at the given coordinates."""
        if not constraints:
            return Fraction(1)
        coords = sorted(constraints)
        p = self.stationary[constraints[coords[0]]]
        for a, b in zip(coords, coords[1:]):
            p *= self.power(b - a)[constraints[a]][constraints[b]]
        return p


def _eye(s: int) -> Matrix:
    return tuple(
        tuple(Fraction(int(i == j)) for j in range(s)) for i in range(s)
    )


def _mul(a: Matrix, b: Matrix) -> Matrix:
    s = len(a)
    return tuple(
        tuple(sum((a[i][t] * b[t][j] for t in range(s)), Fraction(0)) for j in range(s))
        for i in range(s)
    )


@dataclass(frozen=True)
class WindowEvent:
    """Event measurable from coordinates start..start+width-1, given as the
    set of admissible symbol tuples."""

    start: int
    rows: frozenset[tuple[int, ...]]

    def __post_init__(self):
        widths = {len(r) for r in self.rows}
        if len(widths) > 1:
            raise ValueError("all rows must have equal width")
        object.__setattr__(self, "width", next(iter(widths)) if widths else 1)

    @property
    def end(self) -> int:
        return self.start + self.width - 1

    @classmethod
    def of(cls, start: int, rows: Iterable[Sequence[int]]) -> "WindowEvent":
        return cls(start, frozenset(tuple(r) for r in rows))


def event_measure(chain: MarkovChainModel, ev: WindowEvent) -> Fraction:
    total = Fraction(0)
    for row in ev.rows:
        total += chain.path_measure({ev.start + i: s for i, s in enumerate(row)})
    return total


def joint_measure(chain: MarkovChainModel, events: Sequence[WindowEvent]) -> Fraction:
    """mu of the intersection of events in disjoint ordered windows,
    via an interface dynamic program over the chain state."""
    events = sorted(events, key=lambda e: e.start)
    for a, b in zip(events, events[1:]):
        if b.start <= a.end:
            raise ValueError("event windows must be ordered and disjoint")
    w = None  # state vector at the end coordinate of the previous event
    for ev in events:
        if w is None:
            incoming = chain.stationary
        else:
            gap = ev.start - prev_end
            P = chain.power(gap)
            incoming = tuple(
                sum((w[x] * P[x][y] for x in range(chain.states)), Fraction(0))
                for y in range(chain.states)
            )
        nxt = [Fraction(0)] * chain.states
        for row in ev.rows:
            p = incoming[row[0]]
            for a, b in zip(row, row[1:]):
                p *= chain.matrix[a][b]
            nxt[row[-1]] += p
        w = tuple(nxt)
        prev_end = ev.end
    return sum(w, Fraction(0))


def alpha_coefficient(chain: MarkovChainModel, n: int, horizon: int = 0) -> Fraction:
    """Exact sup of |mu(A&B) - mu(A)mu(B)| over past events A (coordinates
    [-horizon, 0]) and future events B (coordinates [n, n+horizon]).

    By the Markov property the supremum is attained on events measurable
    from the boundary coordinates 0 and n alone, so the value is the same
    for every horizon; larger horizons only validate the reduction.
    """
    if n < 0:
        raise ValueError("separation n must be >= 0")
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    if chain.states ** (horizon + 1) > 1 << 20:
        raise ResourceCapError("window algebra too large for this horizon")
    if n == 0:
        warnings.warn(
            "alpha at separation 0 compares overlapping algebras; the value "
            "is a plain covariance maximum",
            stacklevel=2,
        )
    s = chain.states
    pi = chain.stationary
    P = chain.power(n)
    best = Fraction(0)
    for S in range(1, 1 << s):
        for T in range(1, 1 << s):
            val = Fraction(0)
            for a in range(s):
                if not (S >> a) & 1:
                    continue
                for b in range(s):
                    if (T >> b) & 1:
                        val += pi[a] * (P[a][b] - pi[b])
            best = max(best, abs(val))
    return best


def higher_mixing_gap(
    chain: MarkovChainModel,
    cylinders: Sequence[Mapping[int, int]],
    lags: Sequence[int],
) -> Fraction:
    """Exact | mu(G_1 & T^{-l_1} G_2 & ... ) - prod mu(G_i) | for cylinders
    shifted by the cumulative lags; overlapping spans merge exactly."""
    if len(lags) != len(cylinders) - 1:
        raise ValueError("need one lag fewer than cylinders")
    if any(l < 1 for l in lags):
        raise ValueError("lags must be >= 1")
    merged: dict[int, int] = {}
    offset = 0
    contradiction = False
    for i, cyl in enumerate(cylinders):
        if i > 0:
            offset += lags[i - 1]
        for c, sym in cyl.items():
            cc = c + offset
            if merged.setdefault(cc, sym) != sym:
                contradiction = True
        if not cyl:
            raise ValueError("empty cylinder constraint")
    joint = Fraction(0) if contradiction else chain.path_measure(merged)
    prod = Fraction(1)
    for cyl in cylinders:
        prod *= chain.path_measure(dict(cyl))
    return abs(joint - prod)


@dataclass(frozen=True)
class InequalityCheck:
    lhs: Fraction
    rhs: Fraction
    holds: bool
    alphas: tuple[Fraction, ...]


def mixing_inequality_check(
    chain: MarkovChainModel,
    events: Sequence[WindowEvent],
    horizon: int = 0,
) -> InequalityCheck:
    """Exact | mu(^ G_i) - prod mu(G_i) | against the sum of alpha values at
    the window separations."""
    events = list(events)
    for a, b in zip(events, events[1:]):
        if not a.start <= a.end < b.start:
            raise ValueError("event windows must be ordered: m_i <= n_i < m_{i+1}")
    joint = joint_measure(chain, events)
    prod = Fraction(1)
    for ev in events:
        prod *= event_measure(chain, ev)
    lhs = abs(joint - prod)
    alphas = tuple(
        alpha_coefficient(chain, b.start - a.end, horizon)
        for a, b in zip(events, events[1:])
    )
    rhs = sum(alphas, Fraction(0))
    return InequalityCheck(lhs, rhs, lhs <= rhs, alphas)


# ---------------------------------------------------------------------------
# spectral level sets


@dataclass(frozen=True)
class SpectralConstruction:
    """Cantor-like level data: N_0 = 1, N_{k+1} = floor(5 N_k^2 / eps),
    eps_k = eps / N_k; level k is { u : dist(u N_k, Z) <= eps_k }."""

    eps: Fraction
    Ns: tuple[int, ...]
    eps_ks: tuple[Fraction, ...]

    def level_pieces(self, k: int, within: tuple[Fraction, Fraction]) -> list[tuple[Fraction, Fraction]]:
        """Closed intervals of level k meeting [within]; each has width
        2 eps_k / N_k around a multiple of 1/N_k."""
        Nk, ek = self.Ns[k], self.eps_ks[k]
        a, b = within
        out = []
        for m in range(math.ceil(a * Nk - ek), math.floor(b * Nk + ek) + 1):
            lo = max(a, Fraction(m, Nk) - ek / Nk, Fraction(0))
            hi = min(b, Fraction(m, Nk) + ek / Nk, Fraction(1))
            if lo <= hi:
                out.append((lo, hi))
        return out

    def intersection_pieces(self, depth: int) -> list[tuple[Fraction, Fraction]]:
        """Intervals of the intersection of levels 1..depth inside [0, 1]."""
        pieces = [(Fraction(0), Fraction(1))]
        for k in range(1, depth + 1):
            nxt = []
            for piece in pieces:
                nxt.extend(self.level_pieces(k, piece))
            pieces = nxt
        return pieces

    def sample_points(self, depth: int, count: int) -> list[Fraction]:
        """Deterministic rational points of the depth-k intersection.

        Points are spread across the pieces (midpoint first), and each is
        verified to lie in every level up to the requested depth.
        """
        pieces = self.intersection_pieces(depth)
        if not pieces:
            raise RuntimeError("intersection unexpectedly empty; refine the intervals")
        per = -(-count // len(pieces))
        out: list[Fraction] = []
        for lo, hi in pieces:
            for t in range(per):
                u = lo + (hi - lo) * Fraction(2 * t + 1, 2 * per)
                for k in range(1, depth + 1):
                    if dist_to_int(u * self.Ns[k]) > self.eps_ks[k]:
                        raise RuntimeError("sampled point escaped a level set")
                out.append(u)
                if len(out) >= count:
                    return out
        return out


def spectral_levels(eps: Fraction | str, k_max: int) -> SpectralConstruction:
    """Exact N_k and eps_k sequences for 0 < eps < 1/(2 pi), k_max <= 4."""
    eps = parse_fraction(eps) if isinstance(eps, str) else Fraction(eps)
    if not lt_one_over_two_pi(eps):
        raise ValueError(f"eps must lie in (0, 1/(2*pi)); got {eps}")
    if not 0 <= k_max <= 4:
        raise ValueError("k_max must be between 0 and 4 (N_k grows doubly fast)")
    Ns = [1]
    for _ in range(k_max):
        Ns.append(int(5 * Fraction(Ns[-1]) ** 2 / eps))
    eps_ks = tuple(eps / Nk for Nk in Ns)
    return SpectralConstruction(eps, tuple(Ns), eps_ks)


@dataclass(frozen=True)
class SpectralBoundReport:
    max_deviation: Fraction
    samples: int
    n_max: int


def verify_spectral_bound(
    construction: SpectralConstruction,
    k: int,
    samples: int,
    n_cap: int | None = None,
    enumerate_limit: int = 10_000,
) -> SpectralBoundReport:
    """Max over sampled u and admissible n of dist(u n N_k, Z); always <= eps.

    For u in the depth-k intersection, dist(u N_k, Z) <= eps_k, and
    n * dist(u N_k, Z) <= eps < 1/2 for n <= N_k, so the per-u maximum is
    n_max * dist(u N_k, Z) exactly; small ranges are enumerated anyway.
    """
    if not 1 <= k < len(construction.Ns):
        raise ValueError("k outside the constructed depth")
    Nk = construction.Ns[k]
    n_max = min(Nk, n_cap) if n_cap else Nk
    pts = construction.sample_points(k, samples)
    worst = Fraction(0)
    for u in pts:
        base = dist_to_int(u * Nk)
        if n_max <= enumerate_limit:
            dev = max(dist_to_int(u * n * Nk) for n in range(1, n_max + 1))
        else:
            dev = n_max * base
        worst = max(worst, dev)
    if worst > construction.eps:
        raise RuntimeError("level-set bound violated; construction is inconsistent")
    return SpectralBoundReport(worst, len(pts), n_max)
