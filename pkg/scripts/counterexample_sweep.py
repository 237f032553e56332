#!/usr/bin/env python3
"""Half-rotation counterexample, end to end.

Prints the exact recurrence series S(N) (0 on odd N, 1/8 on even N), then the
exact array-average distances whose even/odd split drives the "oscillating"
verdict.  Everything is rational arithmetic; no tolerance anywhere.
"""

from fractions import Fraction

from ergoarrays.averages import ArraySpec, Observable, convergence_sweep
from ergoarrays.recurrence import RecurrenceSpec, detect_syndetic, recurrence_series
from ergoarrays.systems import CircleRotation


def main() -> None:
    rot = CircleRotation(Fraction(1, 2))
    A = rot.arc(0, Fraction(1, 4))

    series = recurrence_series(RecurrenceSpec(rot, A, [(1, 0), (-1, 1)]), 24)
    print("S(N) = (1/N) sum_n mu(A & T^-n A & T^-(N-n) A):")
    for N, v in series.values:
        print(f"  N={N:3d}  S={v}")
    report = detect_syndetic(series, "auto")
    print(f"syndetic certificate: {report.verdict}, members={report.members[:6]}..., "
          f"max_gap={report.max_gap} (window N <= {report.window})")

    f = Observable.indicator(A)
    spec = ArraySpec.create(rot, [f, f], ["N - n", "n"])
    sweep = convergence_sweep(spec, list(range(3, 17)))
    print("\n||A_N - 1/16||^2 along N:")
    for row in sweep.rows:
        print(f"  N={row.N:3d}  {row.value}")
    print(f"verdict: {sweep.verdict} (even tail {sweep.even_tail}, odd tail {sweep.odd_tail})")


if __name__ == "__main__":
    main()
