"""Reproduction runners: one callable per headline experiment.

Each runner re-executes its experiment at the full published parameters and
returns a CriterionResult with a pass/fail verdict plus the artifacts worth
writing to disk.  The CLI `repro-all` subcommand drives them; the test suite
asserts the same claims with independently frozen oracle values.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from . import averages, mixing, pet, recurrence, szemeredi
from .averages import ArraySpec, Observable
from .intpoly import IntPoly2, count_small_values
from .pet import PExpr
from .systems import (
    BernoulliShift,
    CircleRotation,
    CyclicRotation,
    build_lattice_action,
)
from .util import fraction_to_json


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    details: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# deterministic random instance generators (shared with the test suite)


def random_intpoly(rng: random.Random, max_deg_n: int = 4, max_deg_N: int = 2) -> IntPoly2:
    """Random integer-valued polynomial that genuinely depends on n."""
    while True:
        coeffs = {}
        for i in range(max_deg_n + 1):
            for j in range(max_deg_N + 1):
                if rng.random() < 0.4:
                    c = rng.randint(-5, 5)
                    if c:
                        coeffs[(i, j)] = c
        p = IntPoly2.from_coeffs(coeffs)
        if p.depends_on_n():
            return p


def random_markov_chain(rng: random.Random, max_states: int = 4) -> mixing.MarkovChainModel:
    s = rng.randint(2, max_states)
    rows = []
    for _ in range(s):
        weights = [rng.randint(1, 9) for _ in range(s)]
        total = sum(weights)
        rows.append(tuple(Fraction(w, total) for w in weights))
    return mixing.MarkovChainModel(tuple(rows))


def random_window_events(
    rng: random.Random, chain: mixing.MarkovChainModel, k: int, horizon: int
) -> list[mixing.WindowEvent]:
    events = []
    start = rng.randint(-5, 0)
    for _ in range(k):
        width = rng.randint(1, horizon + 1)
        tuples = [
            tuple(rng.randrange(chain.states) for _ in range(width))
            for _ in range(rng.randint(1, 3))
        ]
        events.append(mixing.WindowEvent.of(start, tuples))
        start = events[-1].end + rng.randint(1, 6)
    return events


def random_hypothesis_grid(rng: random.Random, L: int, M: int) -> list[list[int]]:
    """0/1 grid whose every M-square provably contains a 1: a planted
    residue lattice plus random extras."""
    r1, r2 = rng.randrange(M), rng.randrange(M)
    grid = [
        [1 if (n % M == r1 and m % M == r2) or rng.random() < 0.3 else 0 for m in range(L)]
        for n in range(L)
    ]
    return grid


def pet_corpus(count: int = 50, seed: int = 2024) -> list[list[PExpr]]:
    """Deterministic corpus of systems over k <= 3 generators, degrees <= 3.

    All members satisfy the nonconstant-quotient hypotheses.  The full
    expansion of a descent can grow exponentially for dense mixed-degree
    systems, so candidates whose trace exceeds a size budget are skipped;
    the kept cases still range over every (k, member-count, degree) shape
    that completes at desk scale, including descents of 20+ steps.
    """
    cached = _CORPUS_CACHE.get((count, seed))
    if cached is not None:
        return [list(s) for s in cached]
    rng = random.Random(seed)
    # (k, members, max degree); dense degree-3 mixes over k >= 2 generators
    # expand past any reasonable budget and are left out
    shapes = [
        (1, 1, 1), (1, 1, 2), (1, 1, 3), (1, 2, 2), (1, 2, 3), (1, 3, 2), (1, 3, 3),
        (2, 1, 2), (2, 1, 3), (2, 2, 1), (2, 2, 2), (2, 3, 2), (2, 2, 3),
        (3, 1, 2), (3, 1, 3), (3, 2, 1), (3, 2, 2), (3, 3, 2),
    ]
    corpus: list[list[PExpr]] = []
    shape_idx = 0
    while len(corpus) < count:
        k, size, max_deg = shapes[shape_idx % len(shapes)]
        shape_idx += 1
        for _ in range(12):  # rejection attempts per shape visit
            system = _random_pet_system(rng, k, size, max_deg)
            if system is None:
                continue
            try:
                pet.pet_trace(system, max_steps=60, max_system_size=64)
            except RuntimeError:
                continue  # expansion too large for the desk-scale corpus
            corpus.append(system)
            break
    _CORPUS_CACHE[(count, seed)] = [list(s) for s in corpus]
    return corpus


_CORPUS_CACHE: dict[tuple[int, int], list[list[PExpr]]] = {}


def _random_pet_system(rng: random.Random, k: int, size: int, max_deg: int):
    system = []
    for _ in range(size):
        n_exps = []
        for _ in range(k):
            coeffs = {d: rng.randint(-2, 2) for d in range(1, max_deg + 1) if rng.random() < 0.6}
            n_exps.append(IntPoly2.from_coeffs({(d, 0): c for d, c in coeffs.items() if c}))
        N_exps = [IntPoly2.from_coeffs({(0, 1): rng.randint(-2, 2)}) for _ in range(k)]
        system.append(PExpr(tuple(n_exps), tuple(q.drop_constant() for q in N_exps)))
    try:
        pet.weight_matrix(system)
    except ValueError:
        return None
    for i in range(len(system)):
        for j in range(i + 1, len(system)):
            if system[i].mul(system[j].inv()).is_constant_in_n():
                return None
    return system


# ---------------------------------------------------------------------------
# criterion runners


def run_counterexample(n_max: int = 200) -> CriterionResult:
    rot = CircleRotation(Fraction(1, 2))
    A = rot.arc(0, Fraction(1, 4))
    series = recurrence.recurrence_series(
        recurrence.RecurrenceSpec(rot, A, [(1, 0), (-1, 1)]), n_max
    )
    ok = all(
        v == (Fraction(1, 8) if N % 2 == 0 else Fraction(0))
        for N, v in series.values
    )
    f = Observable.indicator(A)
    spec = ArraySpec.create(rot, [f, f], ["N - n", "n"])
    report = averages.convergence_sweep(spec, list(range(3, 17)))
    ok = ok and report.verdict == "oscillating"
    return CriterionResult(
        1,
        "half-rotation counterexample: S(N) dichotomy and oscillating sweep",
        ok,
        {
            "series_even": fraction_to_json(series.as_dict()[2]),
            "series_odd": fraction_to_json(series.as_dict()[3]),
            "sweep_verdict": report.verdict,
        },
    )


def run_linear_weak_mixing_decay(Ns: Sequence[int] = (16, 64, 256, 1024)) -> CriterionResult:
    bern = BernoulliShift.uniform(2)
    f = Observable.indicator(bern.cylinder({0: 0}))
    spec = ArraySpec.create(bern, [f, f], ["n", "2*n + N"])
    dists = [averages.l2_distance_exact(spec, N) for N in Ns]
    ok = all(b < a for a, b in zip(dists, dists[1:])) and dists[-1] < Fraction(1, 100)
    return CriterionResult(
        2,
        "linear array average decays on the Bernoulli shift",
        ok,
        {"Ns": list(Ns), "distances": [fraction_to_json(d) for d in dists]},
    )


def run_closed_form(n_max: int = 256) -> CriterionResult:
    bern = BernoulliShift.uniform(2)
    f = Observable.indicator(bern.cylinder({0: 0}))
    spec = ArraySpec.create(bern, [f], ["n"], center=True)
    bad = [
        N
        for N in range(1, n_max + 1)
        if averages.l2_distance_exact(spec, N) != Fraction(1, 4 * N)
    ]
    return CriterionResult(
        3, "closed form ||A_N||^2 = 1/(4N)", not bad, {"first_bad": bad[:3]}
    )


def run_cyclic_syndetic(moduli: Sequence[int] = (2, 3, 4, 6), n_max: int = 500) -> CriterionResult:
    details = {}
    ok = True
    for m in moduli:
        sys = CyclicRotation(m)
        series = recurrence.recurrence_series(
            recurrence.RecurrenceSpec(sys, sys.point_set([0]), [(1, 0), (-1, 1)]), n_max
        )
        rep = recurrence.detect_syndetic(series, "auto")
        good = rep.verdict == "syndetic-in-window" and rep.max_gap is not None and rep.max_gap <= m * m
        ok = ok and good
        details[f"m={m}"] = {"max_gap": rep.max_gap, "verdict": rep.verdict}
    return CriterionResult(4, "cyclic rotations: syndetic window certificate", ok, details)


def run_grid_extraction(trials: int = 100, seed: int = 11) -> CriterionResult:
    rng = random.Random(seed)
    failures = 0
    for _ in range(trials):
        M = rng.randint(2, 4)
        L = rng.randint(6 * (M + 1), 9 * (M + 1))
        grid = random_hypothesis_grid(rng, L, M)
        ex = recurrence.extract_syndetic_from_grid(grid, 1, M)
        if ex.max_gap_between > 2 * M or any(
            avg < Fraction(1, (M + 1) ** 2) for avg in ex.row_averages
        ):
            failures += 1
    return CriterionResult(
        5,
        "grid extraction: gap and average bounds on random grids",
        failures == 0,
        {"trials": trials, "failures": failures},
    )


def run_parity_dichotomy(n_max: int = 500) -> CriterionResult:
    evens = szemeredi.IntegerSet.from_residue(0, 2, (0, 10**4))
    spec = szemeredi.PatternSpec.parse("(0,0),(1,0),(-1,1)")
    ok = True
    for N in range(1, n_max + 1):
        c = szemeredi.pattern_count(evens, spec, N).count
        if N % 2 == 1 and c != 0:
            ok = False
        if N % 2 == 0 and 2 * c < N:
            ok = False
    rep = szemeredi.syndetic_pattern_report(evens, spec, n_max, "auto")
    ok = ok and rep.max_gap == 2
    return CriterionResult(
        6, "even-set parity dichotomy and syndetic gap 2", ok, {"max_gap": rep.max_gap}
    )


def run_mixing_inequality(trials: int = 100, seed: int = 5) -> CriterionResult:
    rng = random.Random(seed)
    failures = 0
    for _ in range(trials):
        chain = random_markov_chain(rng)
        horizon = rng.randint(0, 2)
        k = rng.randint(2, 3)
        events = random_window_events(rng, chain, k, horizon)
        chk = mixing.mixing_inequality_check(chain, events, horizon)
        if not chk.holds:
            failures += 1
    return CriterionResult(
        7,
        "alpha-sum inequality on random chains",
        failures == 0,
        {"trials": trials, "failures": failures},
    )


def run_spectral(samples: int = 1000) -> CriterionResult:
    c = mixing.spectral_levels(Fraction(1, 10), 2)
    ok = c.Ns == (1, 50, 125000)
    devs = {}
    for k in (1, 2):
        rep = mixing.verify_spectral_bound(c, k, samples)
        devs[f"k={k}"] = fraction_to_json(rep.max_deviation)
        ok = ok and rep.max_deviation <= Fraction(1, 10) and rep.samples >= samples
    return CriterionResult(
        8, "spectral level sets: N_k sequence and deviation bound", ok, {"Ns": list(c.Ns), "max_dev": devs}
    )


def run_pet_descent(count: int = 50) -> CriterionResult:
    failures = 0
    for system in pet_corpus(count):
        try:
            chain = pet.pet_trace(system)
        except Exception:
            failures += 1
            continue
        if not all(pet.precedes(a, b) for a, b in zip(chain[1:], chain)):
            failures += 1
    return CriterionResult(
        9, "weight-matrix descent terminates on the corpus", failures == 0, {"cases": count, "failures": failures}
    )


def run_small_value_bound(trials: int = 500, seed: int = 17) -> CriterionResult:
    rng = random.Random(seed)
    failures = 0
    for _ in range(trials):
        p = random_intpoly(rng)
        K = rng.randint(0, 20)
        N = rng.randint(1, 10**4)
        res = count_small_values(p, K, N)
        if res.bound is None or res.count > res.bound:
            failures += 1
    return CriterionResult(
        10,
        "small-value count bounded by (2K+1) deg_n",
        failures == 0,
        {"trials": trials, "failures": failures},
    )


def run_commuting_consistency(n_max: int = 128) -> CriterionResult:
    bern = BernoulliShift.uniform(2)
    A = bern.cylinder({0: 0})
    pairs = [(1, 0), (2, 1)]
    single = recurrence.recurrence_series(recurrence.RecurrenceSpec(bern, A, pairs), n_max)
    action = build_lattice_action(bern, [p for p, _ in pairs], [q for _, q in pairs])
    comm = recurrence.commuting_recurrence_series(
        recurrence.CommutingRecurrenceSpec(action, A), n_max
    )
    ok = single.values == comm.values
    return CriterionResult(
        11, "lattice-action series equals single-transformation series", ok, {"n_max": n_max}
    )


RUNNERS: dict[int, Callable[[], CriterionResult]] = {
    1: run_counterexample,
    2: run_linear_weak_mixing_decay,
    3: run_closed_form,
    4: run_cyclic_syndetic,
    5: run_grid_extraction,
    6: run_parity_dichotomy,
    7: run_mixing_inequality,
    8: run_spectral,
    9: run_pet_descent,
    10: run_small_value_bound,
    11: run_commuting_consistency,
}


def run_all(criteria: Sequence[int] | None = None) -> list[CriterionResult]:
    which = sorted(criteria) if criteria else sorted(RUNNERS)
    return [RUNNERS[c]() for c in which]
