"""Enumeration of c = P_m - F_n and the multiply-represented values."""

from __future__ import annotations

import csv
import io
import itertools
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .realnum import CertReal, UndecidedError, compute_constants, escalate
from .recurrences import fibonacci, padovan

KNOWN_VALUES: tuple[int, ...] = (
    -226, -82, -52, -30, -27, -18, -9, -6, -5, -4, -3, -1, 0, 1, 2, 3, 4, 6,
    7, 8, 10, 11, 13, 15, 16, 20, 25, 31, 32, 36, 44, 52, 62, 111, 262,
)

# search rectangle as printed: n <= 300 and m <= 190
PRINTED_N_CUTOFF = 300
PRINTED_M_CUTOFF = 190

M_MIN, N_MIN = 4, 2

Pair = tuple[int, int]
DifferenceMap = dict[int, list[Pair]]


@dataclass(frozen=True)
class SolutionRecord:
    c: int
    pairs: tuple[Pair, ...]

    def __post_init__(self) -> None:
        if list(self.pairs) != sorted(set(self.pairs)):
            raise ValueError("pairs must be sorted and distinct")
        for m, n in self.pairs:
            if m < M_MIN or n < N_MIN:
                raise ValueError(f"pair {(m, n)} outside m > 3, n > 1")

    def check(self) -> bool:
        """Every pair re-evaluates to c."""
        return all(padovan(m) - fibonacci(n) == self.c for m, n in self.pairs)

    def pairs_text(self) -> str:
        return ", ".join(f"({m}, {n})" for m, n in self.pairs)


def _check_ranges(m_range: range, n_range: range) -> None:
    if len(m_range) and m_range.start < M_MIN:
        raise ValueError(f"m must be at least {M_MIN}")
    if len(n_range) and n_range.start < N_MIN:
        raise ValueError(f"n must be at least {N_MIN}")


def _stripe(ms: Sequence[int], n_range: range) -> DifferenceMap:
    fib = [fibonacci(n) for n in n_range]
    out: DifferenceMap = defaultdict(list)
    for m in ms:
        p = padovan(m)
        for n, f in zip(n_range, fib):
            out[p - f].append((m, n))
    return out


def merge(maps: Iterable[Mapping[int, list[Pair]]]) -> DifferenceMap:
    out: DifferenceMap = defaultdict(list)
    for mp in maps:
        for c, pairs in mp.items():
            out[c].extend(pairs)
    for pairs in out.values():
        pairs.sort()
    return dict(out)


def enumerate_differences(m_range: range, n_range: range, workers: int = 1) -> DifferenceMap:
    """Map every c = P_m - F_n over the rectangle to its (m, n) pairs.

    With workers > 1 the m-range is split into interleaved stripes and the
    partial maps are merged; the result does not depend on the split.
    """
    _check_ranges(m_range, n_range)
    if workers <= 1 or len(m_range) < 2 * workers:
        return merge([_stripe(m_range, n_range)])
    stripes = [m_range[i::workers] for i in range(workers)]
    with ProcessPoolExecutor(workers) as pool:
        parts = list(pool.map(_stripe, stripes, itertools.repeat(n_range)))
    return merge(parts)


def multi_represented(table: Mapping[int, Sequence[Pair]], min_count: int = 2) -> list[SolutionRecord]:
    if min_count < 1:
        raise ValueError("min_count must be positive")
    return [SolutionRecord(c, tuple(sorted(pairs)))
            for c, pairs in sorted(table.items()) if len(pairs) >= min_count]


def search(m_max: int, n_max: int, min_count: int = 2, workers: int = 1) -> list[SolutionRecord]:
    table = enumerate_differences(range(M_MIN, m_max + 1), range(N_MIN, n_max + 1), workers)
    return multi_represented(table, min_count)


def to_csv(records: Sequence[SolutionRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["c", "pairs"])
    for r in records:
        w.writerow([r.c, r.pairs_text()])
    return buf.getvalue()


def ratio(prec: int) -> CertReal:
    """log(alpha) / log(delta) = 0.5843..."""
    c = compute_constants(prec)
    return c.log_alpha / c.log_delta


def m_cutoff(n_cutoff: int, precision: int = 192) -> int:
    """Largest m that a solution with n <= n_cutoff can have.

    F_n - F_n1 = P_m - P_m1 gives delta^(n-1) >= F_n > P_m - P_(m-1) =
    P_(m-5) >= alpha^(m-7), hence m < 7 + (n - 1) / ratio.
    """
    if n_cutoff < N_MIN:
        raise ValueError(f"n_cutoff must be at least {N_MIN}")
    return escalate(lambda p: (ratio(p).reciprocal() * (n_cutoff - 1) + 7).floor(), precision)


@dataclass
class VerificationReport:
    n_cutoff: int
    m_cutoff: int
    records: list[SolutionRecord]
    expected: tuple[int, ...] = KNOWN_VALUES
    missing: list[int] = field(default_factory=list)
    extra: list[int] = field(default_factory=list)

    @property
    def values(self) -> list[int]:
        return [r.c for r in self.records]

    @property
    def passed(self) -> bool:
        return not self.missing and not self.extra


def verify_theorem(n_cutoff: int = PRINTED_N_CUTOFF, workers: int = 1) -> VerificationReport:
    """Search the whole rectangle implied by n <= n_cutoff and compare with
    the list of 35 values."""
    mc = m_cutoff(n_cutoff)
    records = search(mc, n_cutoff, 2, workers)
    got = {r.c for r in records}
    want = set(KNOWN_VALUES)
    return VerificationReport(n_cutoff, mc, records,
                              missing=sorted(want - got), extra=sorted(got - want))


@dataclass(frozen=True)
class SandwichCheck:
    c: int
    larger: Pair
    smaller: Pair
    lower_ok: bool    # 1 + ratio (m - 7) < n
    upper_ok: bool    # n < 4 + ratio (m - 1)

    @property
    def ok(self) -> bool:
        return self.lower_ok and self.upper_ok


def sandwich_checks(records: Sequence[SolutionRecord], precision: int = 192) -> list[SandwichCheck]:
    """Certified check of the index sandwich for every pair of representations."""
    r = ratio(precision)

    def less(x: CertReal, y: CertReal) -> bool:
        if x.hi < y.lo:
            return True
        if x.lo >= y.hi:
            return False
        raise UndecidedError("sandwich comparison undecided")

    out = []
    for rec in records:
        for small, large in itertools.combinations(rec.pairs, 2):
            m, n = large
            nn = CertReal.exact(n, precision)
            out.append(SandwichCheck(rec.c, large, small,
                                     less(r * (m - 7) + 1, nn), less(nn, r * (m - 1) + 4)))
    return out
