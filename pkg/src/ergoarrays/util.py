"""Small exact-arithmetic helpers shared across modules."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")
U = TypeVar("U")

# Rational bounds on pi, enough digits for every comparison made here.
PI_LO = Fraction(31415926535897932384, 10**19)
PI_HI = Fraction(31415926535897932385, 10**19)


def binom(x: int, k: int) -> int:
    """C(x, k) for any integer x and k >= 0.

    Uses the product formula x(x-1)...(x-k+1)/k!, which is an exact integer
    for every integer x (including negative x).
    """
    if k < 0:
        raise ValueError("binomial index k must be >= 0")
    if k == 0:
        return 1
    num = 1
    for t in range(k):
        num *= x - t
    return num // math.factorial(k)


def frac_mod1(x: Fraction) -> Fraction:
    """x mod 1 as a Fraction in [0, 1)."""
    return x - Fraction(math.floor(x))


def dist_to_int(x: Fraction) -> Fraction:
    """Exact distance from x to the nearest integer."""
    r = frac_mod1(x)
    return min(r, 1 - r)


def parse_fraction(text: str) -> Fraction:
    """Parse "3/4", "-1/2", "5" or a decimal literal into a Fraction."""
    return Fraction(text.strip())


def fraction_to_json(x: Fraction) -> dict:
    """Serialize a rational as decimal strings to avoid precision loss."""
    return {"num": str(x.numerator), "den": str(x.denominator)}


def fraction_from_json(obj: dict) -> Fraction:
    return Fraction(int(obj["num"]), int(obj["den"]))


def mix64(*parts: int) -> int:
    """Deterministic 64-bit mixer (splitmix64 chain) for seeded sampling.

    Stable across runs and platforms, unlike hash().
    """
    acc = 0x9E3779B97F4A7C15
    for p in parts:
        acc = (acc + (p & 0xFFFFFFFFFFFFFFFF) + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
        z = acc
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
        acc = z ^ (z >> 31)
    return acc


def ordered_map(fn: Callable[[T], U], items: Sequence[T], jobs: int = 1) -> list[U]:
    """Map preserving input order; worker threads when jobs > 1.

    The reduction order is fixed by the input order, so results are
    deterministic regardless of scheduling.
    """
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


class ResourceCapError(RuntimeError):
    """Raised when a computation would exceed a configured size cap."""


def lt_one_over_two_pi(eps: Fraction) -> bool:
    """Exact test eps < 1/(2*pi) using rational pi bounds."""
    if eps <= 0:
        return False
    # eps < 1/(2 pi)  <=>  1/(2 eps) > pi; compare against the upper bound.
    return Fraction(1, 2) / eps > PI_HI
