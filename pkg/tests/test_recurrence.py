import random
from fractions import Fraction

import pytest

from ergoarrays.recurrence import (
    CommutingRecurrenceSpec,
    RecurrenceSpec,
    commuting_recurrence_series,
    detect_syndetic,
    extract_syndetic_from_grid,
    recurrence_series,
)
from ergoarrays.repro import random_hypothesis_grid
from ergoarrays.systems import (
    BernoulliShift,
    CircleRotation,
    CyclicRotation,
    GaussMap,
    build_lattice_action,
)


def half_rotation_series(n_max=20):
    rot = CircleRotation(Fraction(1, 2))
    A = rot.arc(0, Fraction(1, 4))
    return recurrence_series(RecurrenceSpec(rot, A, [(1, 0), (-1, 1)]), n_max)


def test_half_rotation_series_values():
    # oracle: the term at n has measure 1/4 iff both n and N-n are even,
    # i.e. iff n and N are both even; otherwise the arcs are disjoint
    series = half_rotation_series(24)
    for N, v in series.values:
        expected = Fraction(1, 8) if N % 2 == 0 else Fraction(0)
        assert v == expected


def test_cyclic_two_series():
    z2 = CyclicRotation(2)
    series = recurrence_series(RecurrenceSpec(z2, z2.point_set([0]), [(1, 0)]), 12)
    for N, v in series.values:
        assert v == Fraction(N // 2, 2 * N)  # (1/2) * #evens <= N, averaged


def test_full_space_series_is_one():
    rot = CircleRotation(Fraction(1, 2))
    spec = RecurrenceSpec(rot, rot.full_set(), [(1, 0), (-1, 1)])
    assert all(v == 1 for _, v in recurrence_series(spec, 6).values)


def test_series_bounds_and_label():
    series = half_rotation_series(10)
    assert series.mu_A == Fraction(1, 4)
    assert all(0 <= v <= series.mu_A for _, v in series.values)
    assert series.n_max == 10


def test_spec_validation():
    rot = CircleRotation(Fraction(1, 2))
    A = rot.arc(0, Fraction(1, 4))
    with pytest.raises(ValueError, match="nonzero"):
        RecurrenceSpec(rot, A, [(0, 1)])
    with pytest.raises(ValueError, match="exact-tier"):
        RecurrenceSpec(GaussMap(), None, [(1, 0)])
    # leading (0,0) is implied and may be given explicitly
    a = RecurrenceSpec(rot, A, [(1, 0)])
    b = RecurrenceSpec(rot, A, [(0, 0), (1, 0)])
    assert a.pairs == b.pairs == ((0, 0), (1, 0))


def test_detect_syndetic_half_rotation():
    report = detect_syndetic(half_rotation_series(20), Fraction(1, 16))
    assert report.members == tuple(range(2, 21, 2))
    assert report.max_gap == 2
    assert report.verdict == "syndetic-in-window"
    assert report.liminf_estimate == Fraction(1, 8)
    assert all(v >= report.threshold for v in (Fraction(1, 8),))


def test_detect_syndetic_full_density_on_weak_mixing():
    bern = BernoulliShift.uniform(2)
    A = bern.cylinder({0: 0})
    series = recurrence_series(RecurrenceSpec(bern, A, [(1, 0), (2, 1)]), 32)
    # distinct coordinates: every term has measure exactly 1/8
    assert all(v == Fraction(1, 8) for _, v in series.values)
    report = detect_syndetic(series, "auto")
    assert report.members == tuple(range(1, 33))
    assert report.max_gap == 1


def test_detect_syndetic_not_found():
    values = {N: Fraction(0) for N in range(1, 21)}
    report = detect_syndetic(values, "auto")
    assert report.verdict == "not-found" and report.members == ()
    report = detect_syndetic(values, Fraction(1, 100))
    assert report.verdict == "not-found"


def test_detect_syndetic_auto_uses_tail():
    # large early values must not inflate the auto threshold
    values = {N: Fraction(1, 100) for N in range(1, 41)}
    values[1] = Fraction(1, 2)
    report = detect_syndetic(values, "auto")
    assert report.threshold == Fraction(1, 200)
    assert report.members == tuple(range(1, 41))


def test_commuting_series_matches_single(rng):
    bern = BernoulliShift.uniform(2)
    A = bern.cylinder({0: 0})
    pairs = [(1, 0), (2, 1), (-1, 2)]
    single = recurrence_series(RecurrenceSpec(bern, A, pairs), 48)
    action = build_lattice_action(bern, [p for p, _ in pairs], [q for _, q in pairs])
    commuting = commuting_recurrence_series(CommutingRecurrenceSpec(action, A), 48)
    assert single.values == commuting.values


# -- grid extraction -----------------------------------------------------------


def test_grid_extraction_even_grid():
    L, M = 100, 2
    grid = [
        [1 if ((n + 1) % 2 == 0 and (m + 1) % 2 == 0) else 0 for m in range(L)]
        for n in range(L)
    ]
    ex = extract_syndetic_from_grid(grid, 1, M)
    assert ex.max_gap_between <= 2 * M
    assert all(avg >= Fraction(1, (M + 1) ** 2) for avg in ex.row_averages)
    assert all(ex.Ns[i] < ex.Ns[i + 1] for i in range(len(ex.Ns) - 1))


def test_grid_extraction_all_ones():
    for M in (1, 2, 3):
        ex = extract_syndetic_from_grid([[1] * 40 for _ in range(40)], 1, M)
        assert ex.max_gap_between <= 2 * M
        assert all(avg >= Fraction(1, (M + 1) ** 2) for avg in ex.row_averages)


def test_grid_extraction_hypothesis_failure():
    with pytest.raises(ValueError, match="hypothesis fails"):
        extract_syndetic_from_grid([[0] * 20 for _ in range(20)], 1, 2)
    grid = [[1] * 20 for _ in range(20)]
    for n in range(4, 8):
        for m in range(10, 14):
            grid[n][m] = 0
    with pytest.raises(ValueError, match=r"\(n,m\)=\(5,11\)"):
        extract_syndetic_from_grid(grid, 1, 4)


def test_grid_extraction_validation():
    with pytest.raises(ValueError, match="square"):
        extract_syndetic_from_grid([[1, 1], [1]], 1, 1)
    with pytest.raises(ValueError, match="nonnegative"):
        extract_syndetic_from_grid([[1, -1], [1, 1]], 1, 1)
    with pytest.raises(ValueError, match="no full strip"):
        extract_syndetic_from_grid([[1] * 3 for _ in range(3)], 1, 2)


def test_grid_extraction_random_grids():
    rng = random.Random(99)
    for _ in range(25):
        M = rng.randint(2, 4)
        L = rng.randint(6 * (M + 1), 8 * (M + 1))
        ex = extract_syndetic_from_grid(random_hypothesis_grid(rng, L, M), 1, M)
        assert ex.max_gap_between <= 2 * M
        assert all(avg >= Fraction(1, (M + 1) ** 2) for avg in ex.row_averages)
