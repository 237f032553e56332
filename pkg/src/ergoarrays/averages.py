"""Nonconventional array averages A_N = (1/N) sum_n prod_j T^{P_j(n,N)} f_j.

The exact path expands the squared L^2 distance of A_N to a scalar target
into pairwise inner products <x_n, x_m> of the array terms; every inner
product is a finite combination of measures of intersections of translated
algebra sets, so the result is an exact rational.  The cost is O(N^2) set
operations, with two shortcuts:

* for a single factor whose exponent is linear in n the terms form a
  stationary family and the expansion collapses to O(N) distinct products;
* on product systems whose coordinates are independent, factors whose
  (translated) supports do not meet split off as separate groups, and a
  centered group of one factor kills the whole term.

A seeded Monte Carlo estimator covers the sampled tier and doubles as a
cross-check of the exact path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .intpoly import IntPoly2
from .sets import ArcUnion, CylinderUnion, intersect
from .systems import GaussMap, LatticeAction, SampledSystem
from .util import ResourceCapError, ordered_map


@dataclass(frozen=True)
class Observable:
    """Affine combination of set indicators: constant + sum coeff * 1_S."""

    constant: Fraction
    terms: tuple[tuple[Fraction, object], ...]

    @classmethod
    def indicator(cls, S) -> "Observable":
        return cls(Fraction(0), ((Fraction(1), S),))

    @classmethod
    def const(cls, c) -> "Observable":
        return cls(Fraction(c), ())

    def shifted_by(self, mean: Fraction) -> "Observable":
        return Observable(self.constant - mean, self.terms)

    def integral(self, measure_fn) -> Fraction:
        total = self.constant
        for coeff, S in self.terms:
            total += coeff * measure_fn(S)
        return total

    def sup_bound(self) -> Fraction:
        """Upper bound for the sup norm (triangle inequality)."""
        return abs(self.constant) + sum((abs(c) for c, _ in self.terms), Fraction(0))

    def eval_at(self, point, member_fn) -> Fraction:
        total = self.constant
        for coeff, S in self.terms:
            if member_fn(point, S):
                total += coeff
        return total


def _measure_of(system):
    return lambda S: system.measure(S)


@dataclass(frozen=True)
class ArraySpec:
    """System, observables f_j and exponent polynomials P_j(n, N)."""

    system: object
    observables: tuple[Observable, ...]
    exponents: tuple[IntPoly2, ...]

    @classmethod
    def create(
        cls,
        system,
        observables: Sequence[Observable],
        exponents: Sequence[IntPoly2 | str],
        center: bool = False,
        assert_distinct_linear: bool = False,
    ) -> "ArraySpec":
        exps = tuple(
            p if isinstance(p, IntPoly2) else IntPoly2.parse(p) for p in exponents
        )
        obs = tuple(observables)
        if len(obs) != len(exps) or not obs:
            raise ValueError("need one exponent per observable, at least one of each")
        if center:
            if isinstance(system, SampledSystem):
                obs = tuple(f.shifted_by(f.integral(_invariant_measure(system))) for f in obs)
            else:
                obs = tuple(f.shifted_by(f.integral(_measure_of(system))) for f in obs)
        if assert_distinct_linear:
            ps = []
            for p in exps:
                lin = p.linear_n_form()
                if lin is not None:
                    ps.append(lin[0])
            if len(ps) != len(set(ps)):
                raise ValueError(
                    "linear n-coefficients p_j must be pairwise distinct for the "
                    "product-of-integrals limit claim"
                )
        return cls(system, obs, exps)

    @property
    def ell(self) -> int:
        return len(self.observables)

    def product_of_integrals(self) -> Fraction:
        m = _measure_of(self.system)
        prod = Fraction(1)
        for f in self.observables:
            prod *= f.integral(m)
        return prod


@dataclass(frozen=True)
class CommutingArraySpec:
    """Observables driven by commuting pairs T_j^n That_j^N of a lattice action."""

    action: LatticeAction
    observables: tuple[Observable, ...]

    def __post_init__(self):
        if len(self.observables) != self.action.ell:
            raise ValueError("need one observable per generator pair")

    def product_of_integrals(self) -> Fraction:
        m = lambda S: self.action.measure(S)
        prod = Fraction(1)
        for f in self.observables:
            prod *= f.integral(m)
        return prod


# ---------------------------------------------------------------------------
# exact engine


class _Engine:
    """Caches translated sets, measures and integrals for one computation."""

    def __init__(self, system, vector_shifts: bool = False):
        self.system = system
        self.vector = vector_shifts
        self._shift_cache: dict = {}
        self._measure_cache: dict = {}
        self.independent = getattr(system, "independent_coords", False)

    def shifted(self, S, shift):
        key = (S, shift)
        out = self._shift_cache.get(key)
        if out is None:
            if self.vector:
                out = self.system.translate_preimage(S, shift)
            else:
                out = self.system.preimage(S, shift)
            self._shift_cache[key] = out
        return out

    def measure(self, S) -> Fraction:
        out = self._measure_cache.get(S)
        if out is None:
            out = self.system.measure(S)
            self._measure_cache[S] = out
        return out

    def factor(self, obs: Observable, shift):
        """(constant, ((coeff, shifted set), ...), support-or-None)."""
        terms = tuple((c, self.shifted(S, shift)) for c, S in obs.terms)
        support = None
        if self.independent and all(isinstance(S, CylinderUnion) for _, S in terms):
            support = frozenset(c for _, S in terms for c in S.coords)
        return (obs.constant, terms, support)

    def inner(self, factors) -> Fraction:
        """Exact integral of the product of the given factors."""
        if self.independent and all(f[2] is not None for f in factors):
            groups = _group_by_overlap(factors)
            total = Fraction(1)
            for g in groups:
                val = self._expand(g)
                if val == 0:
                    return Fraction(0)
                total *= val
            return total
        return self._expand(factors)

    def _expand(self, factors) -> Fraction:
        total = Fraction(0)
        n = len(factors)

        def rec(idx, coeff, inter):
            nonlocal total
            if idx == n:
                total += coeff if inter is None else coeff * self.measure(inter)
                return
            const, terms, _ = factors[idx]
            if const != 0:
                rec(idx + 1, coeff * const, inter)
            for c, S in terms:
                if c == 0:
                    continue
                nxt = S if inter is None else intersect(inter, S)
                if not nxt.is_empty():
                    rec(idx + 1, coeff * c, nxt)

        rec(0, Fraction(1), None)
        return total


def _group_by_overlap(factors):
    """Partition factors into groups with pairwise-disjoint supports."""
    n = len(factors)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if factors[i][2] & factors[j][2]:
                parent[find(i)] = find(j)
    groups: dict[int, list] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(factors[i])
    return [groups[k] for k in sorted(groups)]


def _is_plain_indicator(obs: Observable) -> bool:
    return (
        obs.constant == 0
        and len(obs.terms) == 1
        and obs.terms[0][0] == 1
        and isinstance(obs.terms[0][1], CylinderUnion)
        and len(obs.terms[0][1].rows) == 1
    )


def _fast_indicator_pairs(spec: ArraySpec, N: int) -> Fraction:
    """(1/N^2) sum over pairs of <x_n, x_m> when all observables are plain
    single cylinders on an independent-coordinate system.

    Merging the translated coordinate constraints directly avoids building
    set objects per pair.
    """
    probs = spec.system.probs
    base = []
    for f in spec.observables:
        S = f.terms[0][1]
        row = next(iter(S.rows))
        base.append(tuple(zip(S.coords, row)))
    offsets = [
        [p.eval(n, N) for p in spec.exponents] for n in range(N + 1)
    ]  # offsets[n][j], index 0 unused

    def constraints(n):
        out = []
        for j, pairs in enumerate(base):
            o = offsets[n][j]
            out.extend((c + o, s) for c, s in pairs)
        return out

    per_n = [None] + [constraints(n) for n in range(1, N + 1)]
    total = Fraction(0)
    for n in range(1, N + 1):
        for m in range(n, N + 1):
            seen: dict = {}
            ok = True
            for c, s in per_n[n]:
                if seen.setdefault(c, s) != s:
                    ok = False
                    break
            if ok:
                for c, s in per_n[m]:
                    if seen.setdefault(c, s) != s:
                        ok = False
                        break
            if not ok:
                continue
            val = Fraction(1)
            for s in seen.values():
                val *= probs[s]
            total += val if m == n else 2 * val
    return total / N**2


def array_term_inner(spec: ArraySpec, N: int, n1: int, n2: int) -> Fraction:
    """Exact <x_{n1,N}, x_{n2,N}> for the array terms of the spec."""
    eng = _Engine(spec.system)
    factors = [
        eng.factor(f, p.eval(n, N))
        for n in (n1, n2)
        for f, p in zip(spec.observables, spec.exponents)
    ]
    return eng.inner(factors)


def l2_distance_exact(
    spec: ArraySpec,
    N: int,
    target: Fraction | None = None,
    max_quadratic_n: int = 4096,
) -> Fraction:
    """Exact squared L^2 distance || A_N - c ||^2, c defaulting to the
    product of the observable integrals."""
    if isinstance(spec.system, SampledSystem):
        raise ValueError("sampled-tier system: use l2_distance_mc")
    if N < 1:
        raise ValueError("N must be >= 1")
    c = spec.product_of_integrals() if target is None else Fraction(target)
    eng = _Engine(spec.system)

    if spec.ell == 1 and spec.exponents[0].deg_n <= 1:
        # stationary family: <x_{n+d}, x_n> depends on d only
        p = spec.exponents[0]
        f = spec.observables[0]
        step = p.eval(1, N) - p.eval(0, N)
        mean = f.integral(eng.measure)
        total = Fraction(0)
        for d in range(N):
            ip = eng.inner([eng.factor(f, step * d), eng.factor(f, 0)])
            total += N * ip if d == 0 else 2 * (N - d) * ip
        return total / N**2 - 2 * c * mean + c * c

    if N > max_quadratic_n:
        raise ResourceCapError(
            f"N={N} exceeds the quadratic-path cap {max_quadratic_n}"
        )

    if getattr(spec.system, "independent_coords", False) and all(
        _is_plain_indicator(f) for f in spec.observables
    ):
        pair_sum = _fast_indicator_pairs(spec, N)
        mean_sum = Fraction(0)
        for n in range(1, N + 1):
            factors = [
                eng.factor(f, p.eval(n, N))
                for f, p in zip(spec.observables, spec.exponents)
            ]
            mean_sum += eng.inner(factors)
        return pair_sum - 2 * c * mean_sum / N + c * c

    per_n = []
    for n in range(1, N + 1):
        per_n.append(
            [eng.factor(f, p.eval(n, N)) for f, p in zip(spec.observables, spec.exponents)]
        )
    total = Fraction(0)
    mean_sum = Fraction(0)
    for i in range(N):
        mean_sum += eng.inner(per_n[i])
        for j in range(i, N):
            ip = eng.inner(per_n[i] + per_n[j])
            total += ip if i == j else 2 * ip
    return total / N**2 - 2 * c * mean_sum / N + c * c


def commuting_average(
    cspec: CommutingArraySpec,
    N: int,
    target: Fraction | None = None,
    max_quadratic_n: int = 4096,
) -> Fraction:
    """Exact squared L^2 distance of the mean of prod_j T_j^n That_j^N f_j
    over n = 0..N to the product of integrals.

    The n-range follows the commuting-family limit statement; the average is
    taken over its N+1 terms (the 1/N vs 1/(N+1) normalization is immaterial
    in the limit, and the mean form keeps constant observables exactly at the
    target).
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    action = cspec.action
    c = cspec.product_of_integrals() if target is None else Fraction(target)
    eng = _Engine(action.system, vector_shifts=True)
    terms = N + 1  # n runs 0..N

    if action.ell == 1:
        f = cspec.observables[0]
        z = action.z[0]
        mean = f.integral(eng.measure)
        total = Fraction(0)
        for d in range(terms):
            step = tuple(d * a for a in z)
            ip = eng.inner([eng.factor(f, step), eng.factor(f, tuple(0 for _ in z))])
            total += terms * ip if d == 0 else 2 * (terms - d) * ip
        return total / terms**2 - 2 * c * mean + c * c

    if terms > max_quadratic_n:
        raise ResourceCapError(f"N={N} exceeds the quadratic-path cap")
    per_n = []
    for n in range(terms):
        per_n.append(
            [
                eng.factor(f, action.shift_vector(j + 1, n, N))
                for j, f in enumerate(cspec.observables)
            ]
        )
    total = Fraction(0)
    mean_sum = Fraction(0)
    for i in range(terms):
        mean_sum += eng.inner(per_n[i])
        for j in range(i, terms):
            ip = eng.inner(per_n[i] + per_n[j])
            total += ip if i == j else 2 * ip
    return total / terms**2 - 2 * c * mean_sum / terms + c * c


# ---------------------------------------------------------------------------
# Monte Carlo path


def _invariant_measure(system):
    """Measure of an algebra set under the system's invariant measure."""
    if isinstance(system, GaussMap):

        def gauss_measure(S: ArcUnion):
            total = 0.0
            for a, b in S.arcs:
                total += math.log((1 + b) / (1 + a), 2)
            return Fraction(total).limit_denominator(10**12)

        return gauss_measure
    if isinstance(system, SampledSystem):
        return lambda S: S.measure()
    return _measure_of(system)


@dataclass(frozen=True)
class McEstimate:
    value: float
    stderr: float
    samples: int
    seed: int


def l2_distance_mc(
    spec: ArraySpec,
    N: int,
    samples: int,
    seed: int = 0,
    target: Fraction | None = None,
) -> McEstimate:
    """Seeded Monte Carlo estimate of || A_N - c ||^2 with its standard error."""
    if samples < 2:
        raise ValueError("need at least 2 samples")
    system = spec.system
    sampled = isinstance(system, SampledSystem)
    measure_fn = _invariant_measure(system)
    if target is None:
        target = Fraction(1)
        for f in spec.observables:
            target *= f.integral(measure_fn)
    shifts = [[p.eval(n, N) for p in spec.exponents] for n in range(N + 1)]
    if not getattr(system, "invertible", True):
        if any(s < 0 for row in shifts[1:] for s in row):
            raise ValueError("negative exponents on a non-invertible system")

    if sampled:
        def term_value(x, n):
            v = Fraction(1)
            for f, s in zip(spec.observables, shifts[n]):
                y = system.orbit(x, s)
                v *= f.eval_at(y, lambda pt, S: system.point_in(pt, S))
                if v == 0:
                    return v
            return v
    else:
        eng = _Engine(system)
        pre = [
            [tuple((c, eng.shifted(S, s)) for c, S in f.terms) for f, s in zip(spec.observables, row)]
            for row in shifts
        ]

        def term_value(x, n):
            v = Fraction(1)
            for f, terms in zip(spec.observables, pre[n]):
                acc = f.constant
                for c, S in terms:
                    if system.point_in(x, S):
                        acc += c
                v *= acc
                if v == 0:
                    return v
            return v

    vals = []
    for s in range(samples):
        x = system.sample_point(seed, s)
        acc = Fraction(0)
        for n in range(1, N + 1):
            acc += term_value(x, n)
        vals.append(float((acc / N - target) ** 2))
    mean = sum(vals) / samples
    var = sum((v - mean) ** 2 for v in vals) / (samples - 1)
    return McEstimate(mean, math.sqrt(var / samples), samples, seed)


# ---------------------------------------------------------------------------
# sweeps and van der Corput tables


@dataclass(frozen=True)
class SweepRow:
    N: int
    value: Fraction | float
    method: str
    stderr: float


@dataclass(frozen=True)
class ConvergenceReport:
    rows: tuple[SweepRow, ...]
    verdict: str
    target: Fraction
    tolerance: Fraction
    even_tail: float | None
    odd_tail: float | None


def convergence_sweep(
    spec: ArraySpec,
    Ns: Sequence[int],
    method: str = "exact",
    samples: int = 200,
    seed: int = 0,
    tolerance: Fraction = Fraction(1, 1000),
    jobs: int = 1,
) -> ConvergenceReport:
    """Distances per N plus a decaying / oscillating / inconclusive verdict.

    Oscillation compares the final even-N and odd-N entries; decay asks for
    monotone non-increase within tolerance past a burn-in of the first
    quarter of the Ns.
    """
    Ns = list(Ns)
    if not Ns or any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise ValueError("Ns must be a nonempty increasing sequence")
    target = spec.product_of_integrals()

    def row(N: int) -> SweepRow:
        if method == "exact":
            return SweepRow(N, l2_distance_exact(spec, N), "exact", 0.0)
        est = l2_distance_mc(spec, N, samples, seed + N)
        return SweepRow(N, est.value, "montecarlo", est.stderr)

    rows = tuple(ordered_map(row, Ns, jobs))
    burn = len(rows) // 4
    tail = rows[burn:]
    evens = [r for r in tail if r.N % 2 == 0]
    odds = [r for r in tail if r.N % 2 == 1]
    even_tail = float(evens[-1].value) if evens else None
    odd_tail = float(odds[-1].value) if odds else None

    def tol_between(a: SweepRow, b: SweepRow) -> float:
        if a.method == "exact" and b.method == "exact":
            return float(tolerance)
        return 3.0 * (a.stderr + b.stderr)

    verdict = "inconclusive"
    if evens and odds and abs(even_tail - odd_tail) > tol_between(evens[-1], odds[-1]):
        verdict = "oscillating"
    elif all(
        float(b.value) <= float(a.value) + tol_between(a, b)
        for a, b in zip(tail, tail[1:])
    ):
        verdict = "decaying"
    return ConvergenceReport(rows, verdict, target, tolerance, even_tail, odd_tail)


@dataclass(frozen=True)
class VdcReport:
    """Averaged correlations (1/N) sum_n <x_{n,N}, x_{n+h,N}> for h = 1..H.

    ``dlim_diagnostic`` is a trimmed mean over h (the largest trim_fraction
    of |values| discarded); it is a heuristic stand-in for a density limit
    and is labeled diagnostic everywhere.
    """

    N: int
    H: int
    rows: tuple[tuple[int, Fraction], ...]
    dlim_diagnostic: Fraction
    trim_fraction: Fraction


def vdc_correlations(
    spec: ArraySpec, N: int, H: int, trim_fraction: Fraction = Fraction(1, 20)
) -> VdcReport:
    if H < 1:
        raise ValueError("H must be >= 1")
    if isinstance(spec.system, SampledSystem):
        raise ValueError("sampled-tier system: correlations need the exact tier")
    eng = _Engine(spec.system)

    def factors(n: int):
        return [
            eng.factor(f, p.eval(n, N)) for f, p in zip(spec.observables, spec.exponents)
        ]

    cache = {n: factors(n) for n in range(1, N + H + 1)}
    rows = []
    for h in range(1, H + 1):
        total = Fraction(0)
        for n in range(1, N + 1):
            total += eng.inner(cache[n] + cache[n + h])
        rows.append((h, total / N))
    drop = math.ceil(H * trim_fraction)
    kept = sorted((abs(v), v) for _, v in rows)[: max(H - drop, 1)]
    dlim = sum((v for _, v in kept), Fraction(0)) / len(kept)
    return VdcReport(N, H, tuple(rows), dlim, trim_fraction)
