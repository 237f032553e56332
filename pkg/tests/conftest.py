import random
from fractions import Fraction

import pytest

from ergoarrays.systems import (
    BernoulliLattice,
    BernoulliShift,
    CircleRotation,
    CyclicLattice,
    CyclicRotation,
    MarkovShift,
    RelabeledSystem,
)


def exact_zoo():
    """One system per exact kind, for algebra-wide invariant tests."""
    return [
        CyclicRotation(5),
        CyclicRotation(2),
        CircleRotation(Fraction(1, 3)),
        CircleRotation(Fraction(2, 7)),
        BernoulliShift.uniform(2),
        BernoulliShift((Fraction(1, 4), Fraction(3, 4))),
        MarkovShift(((Fraction(2, 3), Fraction(1, 3)), (Fraction(1, 3), Fraction(2, 3)))),
        CyclicLattice((2, 3)),
        BernoulliLattice((Fraction(1, 2), Fraction(1, 2)), 2),
        RelabeledSystem(CyclicRotation(4), ((0, "a"), (1, "b"), (2, "c"), (3, "d"))),
    ]


@pytest.fixture
def zoo():
    return exact_zoo()


@pytest.fixture
def rng():
    return random.Random(20240817)
