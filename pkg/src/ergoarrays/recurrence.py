"""Multiple-recurrence series S(N) and syndetic-set certificates.

S(N) = (1/N) sum_{n=1}^N mu( intersection_{j=0}^l T^{-(p_j n + q_j N)} A )
with (p_0, q_0) = (0, 0), computed exactly on the exact tier.  Syndeticity
is certified only inside the computed window [1, N_max]; reports always say
so.  The grid-extraction routine turns a two-parameter family of nonnegative
values whose every M-square contains a large entry into a sequence N_j of
column indices with bounded gaps and a lower bound on the column averages.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .systems import LatticeAction, SampledSystem


@dataclass(frozen=True)
class RecurrenceSpec:
    """System, target set A and exponent pairs (p_j, q_j), j = 0..l.

    The leading pair must be (0, 0); every later p_j must be nonzero.
    """

    system: object
    A: object
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pairs = tuple((int(p), int(q)) for p, q in self.pairs)
        if not pairs or pairs[0] != (0, 0):
            pairs = ((0, 0),) + pairs
        object.__setattr__(self, "pairs", pairs)
        if any(p == 0 for p, _ in pairs[1:]):
            raise ValueError("p_j must be nonzero for j >= 1")
        if isinstance(self.system, SampledSystem):
            raise ValueError("recurrence series need an exact-tier system")


@dataclass(frozen=True)
class CommutingRecurrenceSpec:
    """Same series driven by commuting pairs (T_j, That_j) of a lattice action."""

    action: LatticeAction
    A: object


@dataclass(frozen=True)
class RecurrenceSeries:
    values: tuple[tuple[int, Fraction], ...]  # (N, S(N)), N = 1..N_max
    mu_A: Fraction
    label: str

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.values)

    @property
    def n_max(self) -> int:
        return self.values[-1][0]


def recurrence_series(spec: RecurrenceSpec, n_max: int) -> RecurrenceSeries:
    """Exact S(N) for N = 1..n_max; preimages are memoized per shift."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    sys, A = spec.system, spec.A
    shifted: dict[int, object] = {0: A}

    def pre(shift: int):
        out = shifted.get(shift)
        if out is None:
            out = sys.preimage(A, shift)
            shifted[shift] = out
        return out

    values = []
    for N in range(1, n_max + 1):
        total = Fraction(0)
        for n in range(1, N + 1):
            inter = A
            for p, q in spec.pairs[1:]:
                inter = inter.intersect(pre(p * n + q * N))
                if inter.is_empty():
                    break
            else:
                total += sys.measure(inter)
        values.append((N, total / N))
    return RecurrenceSeries(tuple(values), sys.measure(A), "single-transformation")


def commuting_recurrence_series(spec: CommutingRecurrenceSpec, n_max: int) -> RecurrenceSeries:
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    action, A = spec.action, spec.A
    shifted: dict[tuple, object] = {}

    def pre(v: tuple):
        out = shifted.get(v)
        if out is None:
            out = action.preimage_set(A, v)
            shifted[v] = out
        return out

    values = []
    for N in range(1, n_max + 1):
        total = Fraction(0)
        for n in range(1, N + 1):
            inter = A
            for j in range(1, action.ell + 1):
                inter = inter.intersect(pre(action.shift_vector(j, n, N)))
                if inter.is_empty():
                    break
            else:
                total += action.measure(inter)
        values.append((N, total / N))
    return RecurrenceSeries(tuple(values), action.measure(A), "commuting-family")


@dataclass(frozen=True)
class SyndeticReport:
    """Window-limited certificate: every member N satisfies value(N) >= threshold.

    ``max_gap`` is the largest difference between consecutive members (None
    for fewer than two members); the certificate covers only [1, window].
    """

    threshold: Fraction | None
    members: tuple[int, ...]
    max_gap: int | None
    verdict: str  # "syndetic-in-window" | "not-found"
    liminf_estimate: Fraction | None
    window: int


def detect_syndetic(
    series: RecurrenceSeries | Mapping[int, Fraction],
    eps: Fraction | str = "auto",
) -> SyndeticReport:
    """Threshold the series; eps="auto" takes half the max over the final
    half of the window."""
    values = series.as_dict() if isinstance(series, RecurrenceSeries) else dict(series)
    if not values:
        raise ValueError("empty series")
    n_max = max(values)
    if eps == "auto":
        tail = [values[N] for N in values if N > n_max // 2]
        peak = max(tail)
        if peak == 0:
            return SyndeticReport(None, (), None, "not-found", None, n_max)
        eps = peak / 2
    eps = Fraction(eps)
    members = tuple(sorted(N for N, v in values.items() if v >= eps))
    if not members:
        return SyndeticReport(eps, (), None, "not-found", None, n_max)
    gaps = [b - a for a, b in zip(members, members[1:])]
    return SyndeticReport(
        eps,
        members,
        max(gaps) if gaps else None,
        "syndetic-in-window",
        min(values[N] for N in members),
        n_max,
    )


@dataclass(frozen=True)
class GridExtraction:
    """Column indices N_j with bounded gaps extracted from a grid.

    Gap convention here counts integers strictly between consecutive members
    (and before the first); the construction bounds that count by 2M, while
    the plain difference N_{j+1} - N_j can reach 2M + 1.
    """

    Ns: tuple[int, ...]
    row_averages: tuple[Fraction, ...]
    eps: Fraction
    M: int

    @property
    def max_gap_between(self) -> int:
        prev = 0
        worst = 0
        for N in self.Ns:
            worst = max(worst, N - prev - 1)
            prev = N
        return worst


def extract_syndetic_from_grid(grid: Sequence[Sequence], eps, M: int) -> GridExtraction:
    """Run the strip construction on a nonnegative grid a[n-1][m-1], n, m in [1, L].

    Requires every M-square inside the grid to contain an entry >= eps
    (checked exhaustively with sliding-window maxima).  For each strip
    j(M+1) <= m < (j+1)(M+1) the column N_j maximizing the partial column sum
    over n <= j(M+1) is selected; the returned members satisfy the gap bound
    (<= 2M integers skipped) and column averages >= eps/(M+1)^2, both
    asserted.
    """
    eps = Fraction(eps)
    if M < 1:
        raise ValueError("M must be >= 1")
    L = len(grid)
    if L == 0 or any(len(row) != L for row in grid):
        raise ValueError("grid must be square and nonempty")
    a = [[Fraction(v) for v in row] for row in grid]
    if any(v < 0 for row in a for v in row):
        raise ValueError("grid entries must be nonnegative")
    if L < M:
        raise ValueError("grid smaller than one M-square")

    bad = _first_bad_square(a, eps, M)
    if bad is not None:
        raise ValueError(
            f"hypothesis fails: the {M}x{M} square at (n,m)=({bad[0]+1},{bad[1]+1}) "
            f"has every entry < {eps}"
        )

    Ns: list[int] = []
    averages: list[Fraction] = []
    j = 1
    while (j + 1) * (M + 1) - 1 <= L:
        lo, hi = j * (M + 1), (j + 1) * (M + 1)  # columns m in [lo, hi)
        depth = j * (M + 1)  # rows n in [1, depth]
        best_m, best_sum = None, None
        for m in range(lo, hi):
            s = sum((a[n - 1][m - 1] for n in range(1, depth + 1)), Fraction(0))
            if best_sum is None or s > best_sum:
                best_m, best_sum = m, s
        if best_sum * (M + 1) < eps * j:
            raise RuntimeError("internal error: strip sum below the guaranteed bound")
        Nj = best_m
        full = sum((a[n - 1][Nj - 1] for n in range(1, Nj + 1)), Fraction(0))
        avg = full / Nj
        if avg < eps / (M + 1) ** 2:
            raise RuntimeError(
                f"column average {avg} at N_{j}={Nj} fell below eps/(M+1)^2"
            )
        Ns.append(Nj)
        averages.append(avg)
        j += 1
    if not Ns:
        raise ValueError(f"grid of side {L} holds no full strip for M={M}")
    out = GridExtraction(tuple(Ns), tuple(averages), eps, M)
    if out.max_gap_between > 2 * M:
        raise RuntimeError("internal error: gap bound 2M violated")
    return out


def _first_bad_square(a: list[list[Fraction]], eps: Fraction, M: int):
    """Top-left corner (0-based) of an M-square with all entries < eps, or None.

    Two passes of a monotone-deque sliding maximum give all M-window maxima.
    """
    L = len(a)
    row_max = [_window_max(row, M) for row in a]  # per row: maxima over m-windows
    for mw in range(L - M + 1):
        col = [row_max[n][mw] for n in range(L)]
        col_max = _window_max(col, M)
        for nw in range(L - M + 1):
            if col_max[nw] < eps:
                return (nw, mw)
    return None


def _window_max(vals: Sequence, M: int) -> list:
    out = []
    from collections import deque

    dq: deque[int] = deque()
    for i, v in enumerate(vals):
        while dq and vals[dq[-1]] <= v:
            dq.pop()
        dq.append(i)
        if dq[0] <= i - M:
            dq.popleft()
        if i >= M - 1:
            out.append(vals[dq[0]])
    return out
