import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ergoarrays.intpoly import IntPoly2
from ergoarrays.pet import (
    PExpr,
    ShiftTooSmallError,
    SystemHypothesisError,
    Weight,
    WeightMatrix,
    equivalent,
    pet_trace,
    precedes,
    reduce_step,
    weight,
    weight_matrix,
)
from ergoarrays.repro import _random_pet_system


def E(*n_exps, N_exps=None):
    return PExpr.make(list(n_exps), N_exps)


def test_weight_examples():
    assert weight(E("n**2")) == Weight(1, 2)
    assert weight(E("n**2", "n")) == Weight(2, 1)
    assert weight(E("3*n")) == Weight(1, 1)
    with pytest.raises(ValueError, match="no weight"):
        weight(E("0", "0"))


def test_weight_ordering_is_index_dominant():
    assert Weight(2, 1) > Weight(1, 5)
    assert Weight(1, 3) > Weight(1, 2)
    assert sorted([Weight(2, 1), Weight(1, 4)]) == [Weight(1, 4), Weight(2, 1)]


def test_equivalent_examples():
    assert equivalent(E("n**2"), E("n**2 + n")) is True
    assert equivalent(E("n**2"), E("2*n**2")) is False
    assert equivalent(E("n", "n**2"), E("0", "n**2")) is True


def test_weight_matrix_examples():
    m0 = weight_matrix([E("n")])
    assert m0.entries == (((1, 1), 1),) and m0.is_m0()
    assert weight_matrix([E("n"), E("2*n")]).entries == (((1, 1), 2),)
    assert weight_matrix([E("n**2"), E("n**2 + n")]).entries == (((1, 2), 1),)


def test_precedes_examples():
    m = WeightMatrix.from_counts(1, 1, {(1, 1): 1})
    m_prime = WeightMatrix.from_counts(1, 1, {})
    assert precedes(m_prime, m) is True
    assert precedes(m, m) is False
    a = WeightMatrix.from_counts(2, 2, {(1, 1): 7})
    b = WeightMatrix.from_counts(2, 2, {(2, 2): 1})
    assert precedes(a, b) is True  # pivot (2,2); lower weights arbitrary


def test_precedes_requires_untouched_higher_weights():
    # decrement at (1,1) but change (1,2) as well: not a legal descent
    a = WeightMatrix.from_counts(1, 2, {(1, 1): 1, (1, 2): 5})
    b = WeightMatrix.from_counts(1, 2, {(1, 1): 2, (1, 2): 4})
    assert precedes(a, b) is False


def test_reduce_step_square():
    out = reduce_step([E("n**2")], 1)
    assert out == [E("2*n")]
    assert precedes(weight_matrix(out), weight_matrix([E("n**2")]))


def test_reduce_step_degree_one_pair():
    out = reduce_step([E("n"), E("2*n")], 1)
    assert out == [E("n")]
    assert weight_matrix(out).is_m0()


def test_reduce_step_pivot_validation():
    with pytest.raises(ValueError, match="minimal-weight"):
        # auxiliary system of {n, n^2} is {n, n^2, n^2+2n}; index 1 is not minimal
        reduce_step([E("n"), E("n**2")], 1, pivot=1)
    with pytest.raises(ValueError, match="outside"):
        reduce_step([E("n")], 1, pivot=5)


def test_reduce_step_hypothesis_errors():
    with pytest.raises(SystemHypothesisError, match="constant in n"):
        reduce_step([E("0", N_exps=["N"])], 1)
    with pytest.raises(SystemHypothesisError, match="quotient"):
        reduce_step([E("n"), E("n", N_exps=["N"])], 1)


def test_reduce_step_shift_too_small_retryable():
    # the h=1 copy of E1 has the n-part of E2 but a different N-part, so the
    # auxiliary family would carry an element constant in n
    sys_ = [E("n**2"), PExpr.make(["n**2 + 2*n"], ["N"])]
    with pytest.raises(ShiftTooSmallError):
        reduce_step(sys_, 1)
    out = reduce_step(sys_, 2)  # larger shift succeeds
    assert precedes(weight_matrix(out), weight_matrix(sys_))


def test_reduce_step_exact_collision_collapses():
    # with equal N-parts the h=1 copy of E1 *equals* E2; systems are sets,
    # so the copy merges and the reduction stays legal
    sys_ = [E("n**2"), E("n**2 + 2*n")]
    out = reduce_step(sys_, 1)
    assert precedes(weight_matrix(out), weight_matrix(sys_))


def test_pet_trace_base_case():
    assert pet_trace([E("n")]) == [weight_matrix([E("n")])]


def test_pet_trace_square_and_cube():
    chain = pet_trace([E("n**2")])
    assert len(chain) == 2 and chain[-1].is_m0()
    chain3 = pet_trace([E("n**3")])
    assert chain3[-1].is_m0()
    for later, earlier in zip(chain3[1:], chain3):
        assert precedes(later, earlier)


def test_pet_trace_stops_at_degree_one_system():
    sys_ = [E("n"), E("2*n"), E("3*n")]
    chain = pet_trace(sys_)
    assert chain == [weight_matrix(sys_)]


def test_pet_trace_explicit_schedule():
    chain = pet_trace([E("n**2")], h_schedule=[3])
    assert chain[-1].is_m0()
    bad = [E("n**2"), PExpr.make(["n**2 + 2*n"], ["N"])]
    with pytest.raises(ShiftTooSmallError):
        pet_trace(bad, h_schedule=[1])
    pet_trace(bad)  # the default schedule retries past h = 1
    with pytest.raises(ValueError, match="exhausted"):
        pet_trace([E("n**3")], h_schedule=[1])


def test_n_parts_carried_untouched():
    # N-exponents ride along without affecting weights or the descent
    sys_ = [PExpr.make(["n**2"], ["3*N"])]
    chain = pet_trace(sys_)
    assert chain[-1].is_m0()
    out = reduce_step(sys_, 1)
    assert [e.N_exps for e in out] == [(IntPoly2.zero(),)]  # psi * psi^{-1}


def test_group_laws():
    a, b, c = E("n", "0"), E("n**2", "n"), E("0", "2*n")
    assert a.mul(b) == b.mul(a)
    assert a.mul(b.mul(c)) == a.mul(b).mul(c)
    assert a.mul(a.inv()) == PExpr.identity(2)
    assert PExpr.identity(2).mul(a) == a


def test_weight_invariant_under_smaller_index_multiplication():
    e = E("n", "n**2")  # weight (2, 2)
    small = E("n**3", "0")  # only generator 1 exponents
    assert weight(e.mul(small)) == weight(e)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_random_descents_terminate_and_descend(seed):
    rng = random.Random(seed)
    shapes = [(1, 1, 4), (2, 1, 4), (3, 1, 4), (1, 2, 2), (2, 2, 2), (3, 3, 2)]
    k, members, deg = shapes[rng.randrange(len(shapes))]
    system = _random_pet_system(rng, k, members, deg)
    if system is None:
        return
    try:
        chain = pet_trace(system, max_steps=200, max_system_size=256)
    except RuntimeError:
        return  # expansion past the desk-scale budget, not a descent failure
    assert chain[-1] is not None
    for later, earlier in zip(chain[1:], chain):
        assert precedes(later, earlier)


def test_normalization_strips_origin_values():
    e = PExpr.make(["n**2 + 5"], ["N + 7"])
    assert e.n_exps[0].eval(0, 0) == 0
    assert e.N_exps[0].eval(0, 0) == 0


def test_make_rejects_mixed_variables():
    with pytest.raises(ValueError):
        PExpr(
            (IntPoly2.parse("n*N"),),
            (IntPoly2.zero(),),
        )
