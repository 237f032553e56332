#!/usr/bin/env python3
"""Weight-matrix descents for a few polynomial-exponent systems.

Shows the strictly descending chain of weight matrices produced by iterated
differencing, down to the trivial matrix or an all-degree-one system.
"""

from ergoarrays.pet import PExpr, pet_trace, weight_matrix


def show(label: str, n_exps_list) -> None:
    system = [PExpr.make(exps) for exps in n_exps_list]
    chain = pet_trace(system)
    print(f"{label}:")
    print(f"  start  {weight_matrix(system).entries}")
    for i, m in enumerate(chain[1:], 1):
        print(f"  step {i}  {m.entries}")
    print(f"  terminal trivial: {chain[-1].is_m0()}\n")


def main() -> None:
    show("single square  {T^(n^2)}", [["n**2"]])
    show("single cubic   {T^(n^3)}", [["n**3"]])
    show("pair           {T^(n^2), T^(n^2+n)}", [["n**2"], ["n**2 + n"]])
    show(
        "two generators {T1^(n^2) T2^n, T2^(2n)}",
        [["n**2", "n"], ["0", "2*n"]],
    )


if __name__ == "__main__":
    main()
