"""Certified continued-fraction expansion and exact convergents."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence, Union

from .realnum import MAX_PRECISION, START_PRECISION, CertReal

Refinable = Callable[[int], CertReal]
Source = Union[Refinable, CertReal, Fraction, int]

SUSPICIOUS_QUOTIENT = 10 ** 6


class NotReached(LookupError):
    """No computed convergent has a large enough denominator."""


class IrrationalitySuspicion(UserWarning):
    pass


@dataclass(frozen=True)
class PartialQuotients:
    quotients: tuple[int, ...]
    source: str = ""
    precision: int = 0
    truncated: bool = False    # precision cap hit before `count` quotients
    terminated: bool = False   # exact rational input whose expansion ended

    def __len__(self) -> int:
        return len(self.quotients)

    def __getitem__(self, i):
        return self.quotients[i]


@dataclass(frozen=True)
class Convergent:
    index: int
    p: int
    q: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)


def common_prefix(lo: Fraction, hi: Fraction, count: int) -> tuple[list[int], bool]:
    """Partial quotients shared by every real in [lo, hi].

    Returns (quotients, terminated); terminated is True only for lo == hi
    when the rational's expansion runs out.
    """
    out: list[int] = []
    x_lo, x_hi = lo, hi
    while len(out) < count:
        a = math.floor(x_lo)
        if math.floor(x_hi) != a:
            break
        out.append(a)
        r_lo, r_hi = x_lo - a, x_hi - a
        if r_lo == 0 or r_hi == 0:
            # an endpoint is rational here; only a point interval terminates
            return out, r_lo == r_hi == 0
        # x -> 1/x reverses the order
        x_lo, x_hi = 1 / r_hi, 1 / r_lo
    return out, False


def expand(x: Source, count: int, precision: int = START_PRECISION,
           max_prec: int = MAX_PRECISION, label: str = "") -> PartialQuotients:
    """First `count` certified partial quotients of x.

    x may be a callable prec -> CertReal enclosing an irrational number, a
    fixed CertReal, or an exact rational.  A quotient is emitted only when
    both ends of the enclosure agree on it; otherwise the enclosure is
    recomputed at doubled precision.  If max_prec is reached first, the
    certified prefix is returned with truncated=True.
    """
    if count < 1:
        raise ValueError("count must be positive")
    if isinstance(x, (int, Fraction)):
        qs, done = common_prefix(Fraction(x), Fraction(x), count)
        return PartialQuotients(tuple(qs), label or str(x), 0, False, done)
    if isinstance(x, CertReal):
        lo, hi = x.fraction_bounds()
        qs, done = common_prefix(lo, hi, count)
        _warn_large(qs, label)
        return PartialQuotients(tuple(qs), label, x.prec, len(qs) < count and not done, done)

    prec = precision
    while True:
        lo, hi = x(prec).fraction_bounds()
        qs, done = common_prefix(lo, hi, count)
        if len(qs) >= count or done:
            _warn_large(qs, label)
            return PartialQuotients(tuple(qs), label, prec, False, done)
        if prec >= max_prec:
            _warn_large(qs, label)
            return PartialQuotients(tuple(qs), label, prec, True, False)
        prec = min(2 * prec, max_prec)


def _warn_large(qs: Sequence[int], label: str) -> None:
    for i, a in enumerate(qs[1:], start=1):
        if a > SUSPICIOUS_QUOTIENT:
            warnings.warn(f"partial quotient a_{i} = {a} of {label or 'x'} is suspiciously "
                          "large; the input may be rational", IrrationalitySuspicion,
                          stacklevel=3)
            return


def convergents(pq: PartialQuotients | Sequence[int]) -> list[Convergent]:
    qs = pq.quotients if isinstance(pq, PartialQuotients) else tuple(pq)
    if not qs:
        raise ValueError("no partial quotients")
    out = []
    p_prev, q_prev, p, q = 1, 0, qs[0], 1
    out.append(Convergent(0, p, q))
    for i, a in enumerate(qs[1:], start=1):
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        out.append(Convergent(i, p, q))
    return out


def first_convergent_exceeding(convs: PartialQuotients | Sequence[Convergent],
                               threshold: int) -> Convergent:
    """Convergent of least index with q > threshold."""
    if isinstance(convs, PartialQuotients):
        convs = convergents(convs)
    for c in convs:
        if c.q > threshold:
            return c
    raise NotReached(f"no convergent with q > {threshold} among {len(convs)}; "
                     "extend the expansion")


def locate(convs: Sequence[Convergent], p: int, q: int) -> int | None:
    """Index of the convergent equal to p/q, or None."""
    for c in convs:
        if c.p == p and c.q == q:
            return c.index
    return None
