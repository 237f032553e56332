"""Exact desk-scale experiments in computational ergodic theory.

The library computes, with exact rational arithmetic wherever the underlying
system allows it: averages of nonconventional arrays (1/N) sum_n prod_j
T^{P_j(n,N)} f_j, multiple-recurrence series, syndetic-set certificates,
Szemeredi-type pattern counts on integer sets, weight-matrix reduction
bookkeeping for polynomial-exponent systems, alpha-mixing coefficients of
finite Markov shifts, and Cantor-like spectral level sets.
"""

__version__ = "0.1.0"
