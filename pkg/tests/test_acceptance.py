"""Acceptance suite: one test per headline claim, full published parameters.

Each test prints a PASS line on success (run with -s to see them); every
tolerance is pinned here, and exact-arithmetic claims assert equality of
rationals with zero tolerance.
"""

import random
from fractions import Fraction

from ergoarrays import mixing, pet, recurrence, szemeredi
from ergoarrays.averages import ArraySpec, Observable, convergence_sweep, l2_distance_exact
from ergoarrays.intpoly import count_small_values
from ergoarrays.repro import (
    pet_corpus,
    random_hypothesis_grid,
    random_intpoly,
    random_markov_chain,
    random_window_events,
)
from ergoarrays.systems import (
    BernoulliShift,
    CircleRotation,
    CyclicRotation,
    build_lattice_action,
)


def _report(number: int, text: str) -> None:
    print(f"ACCEPTANCE {number:2d}: PASS  {text}")


def test_criterion_1_half_rotation_counterexample():
    rot = CircleRotation(Fraction(1, 2))
    A = rot.arc(0, Fraction(1, 4))
    series = recurrence.recurrence_series(
        recurrence.RecurrenceSpec(rot, A, [(1, 0), (-1, 1)]), 200
    )
    for N, v in series.values:
        if N % 2 == 1:
            assert v == 0, f"S({N}) must vanish exactly"
        else:
            assert v == Fraction(1, 8), f"S({N}) must equal 1/8 exactly"
    f = Observable.indicator(A)
    spec = ArraySpec.create(rot, [f, f], ["N - n", "n"])
    sweep = convergence_sweep(spec, list(range(3, 17)))
    assert sweep.verdict == "oscillating"
    _report(1, "S(N) = 0 (odd) / 1/8 (even) for N <= 200; sweep oscillates")


def test_criterion_2_bernoulli_linear_decay():
    bern = BernoulliShift.uniform(2)
    f = Observable.indicator(bern.cylinder({0: 0}))
    spec = ArraySpec.create(bern, [f, f], ["n", "2*n + N"])
    Ns = [2**4, 2**6, 2**8, 2**10]
    dists = [l2_distance_exact(spec, N) for N in Ns]
    assert all(b < a for a, b in zip(dists, dists[1:])), "must decrease strictly"
    assert dists[-1] < Fraction(1, 100)
    _report(2, f"||A_N - 1/4||^2 strictly decreasing, final {dists[-1]} < 1e-2")


def test_criterion_3_closed_form_quarter_over_N():
    bern = BernoulliShift.uniform(2)
    f = Observable.indicator(bern.cylinder({0: 0}))
    spec = ArraySpec.create(bern, [f], ["n"], center=True)
    for N in range(1, 257):
        assert l2_distance_exact(spec, N) == Fraction(1, 4 * N)
    _report(3, "||A_N||^2 == 1/(4N) exactly for N = 1..256")


def test_criterion_4_cyclic_syndetic_certificates():
    for m in (2, 3, 4, 6):
        sys = CyclicRotation(m)
        series = recurrence.recurrence_series(
            recurrence.RecurrenceSpec(sys, sys.point_set([0]), [(1, 0), (-1, 1)]), 500
        )
        report = recurrence.detect_syndetic(series, "auto")
        assert report.verdict == "syndetic-in-window", f"m={m}"
        assert report.max_gap is not None and report.max_gap <= m * m, f"m={m}"
    _report(4, "Z_m rotations m=2,3,4,6: syndetic-in-window with max_gap <= m^2")


def test_criterion_5_grid_extraction_bounds():
    rng = random.Random(11)
    ok = 0
    for _ in range(100):
        M = rng.randint(2, 4)
        L = rng.randint(6 * (M + 1), 9 * (M + 1))
        grid = random_hypothesis_grid(rng, L, M)
        ex = recurrence.extract_syndetic_from_grid(grid, 1, M)
        assert ex.max_gap_between <= 2 * M
        assert all(avg >= Fraction(1, (M + 1) ** 2) for avg in ex.row_averages)
        ok += 1
    assert ok == 100
    _report(5, "100/100 random grids: gap <= 2M and averages >= eps/(M+1)^2")


def test_criterion_6_parity_dichotomy():
    evens = szemeredi.IntegerSet.from_residue(0, 2, (0, 10**4))
    spec = szemeredi.PatternSpec.parse("(0,0),(1,0),(-1,1)")
    for N in range(1, 501):
        c = szemeredi.pattern_count(evens, spec, N).count
        if N % 2 == 1:
            assert c == 0, f"odd N={N}"
        else:
            assert 2 * c >= N, f"even N={N}"
    report = szemeredi.syndetic_pattern_report(evens, spec, 500, "auto")
    assert report.max_gap == 2
    _report(6, "even-set counts: 0 for odd N, >= N/2 for even N <= 500; gap 2")


def test_criterion_7_mixing_inequality_trials():
    rng = random.Random(5)
    holds = 0
    for _ in range(100):
        chain = random_markov_chain(rng, max_states=4)
        horizon = rng.randint(0, 2)
        events = random_window_events(rng, chain, rng.randint(2, 3), horizon)
        chk = mixing.mixing_inequality_check(chain, events, horizon)
        assert chk.holds
        holds += 1
    assert holds == 100
    _report(7, "100/100 random chains satisfy the alpha-sum inequality exactly")


def test_criterion_8_spectral_levels_and_bound():
    c = mixing.spectral_levels(Fraction(1, 10), 2)
    assert c.Ns == (1, 50, 125000)
    for k in (1, 2):
        rep = mixing.verify_spectral_bound(c, k, 1000)
        assert rep.samples >= 1000
        assert rep.max_deviation <= Fraction(1, 10)
        assert rep.n_max == c.Ns[k]  # every admissible n covered
    _report(8, "N_k = [1, 50, 125000]; max deviation <= 1/10 over 10^3 samples")


def test_criterion_9_pet_descent_corpus():
    corpus = pet_corpus(50)
    assert len(corpus) == 50
    for system in corpus:
        chain = pet.pet_trace(system)
        for later, earlier in zip(chain[1:], chain):
            assert pet.precedes(later, earlier)
        # terminal: the trivial matrix, or a system of degree-one expressions
        # (whose weight matrix is supported on weights (r, 1))
        assert chain[-1].is_m0() or all(d == 1 for (_, d), _ in chain[-1].entries)
    _report(9, "50/50 descents terminate with strictly preceding chains")


def test_criterion_10_small_value_bound():
    rng = random.Random(17)
    for _ in range(500):
        p = random_intpoly(rng)
        K = rng.randint(0, 20)
        N = rng.randint(1, 10**4)
        res = count_small_values(p, K, N)
        assert res.bound == (2 * K + 1) * p.deg_n
        assert res.count <= res.bound
    _report(10, "500/500 random (p, K, N): count within (2K+1) deg_n")


def test_criterion_11_commuting_consistency():
    bern = BernoulliShift.uniform(2)
    A = bern.cylinder({0: 0})
    pairs = [(1, 0), (2, 1)]
    single = recurrence.recurrence_series(recurrence.RecurrenceSpec(bern, A, pairs), 128)
    action = build_lattice_action(bern, [p for p, _ in pairs], [q for _, q in pairs])
    commuting = recurrence.commuting_recurrence_series(
        recurrence.CommutingRecurrenceSpec(action, A), 128
    )
    assert single.values == commuting.values
    _report(11, "lattice-action series == single-transformation series, N <= 128")
