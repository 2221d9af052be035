"""Exact Padovan and Fibonacci terms, Binet enclosures and growth checks."""

from __future__ import annotations

import enum
import threading
from dataclasses import dataclass, field

from .realnum import (
    MAX_PRECISION,
    START_PRECISION,
    CertReal,
    UndecidedError,
    compute_constants,
    escalate,
)


class SequenceKind(enum.Enum):
    PADOVAN = "padovan"
    FIBONACCI = "fibonacci"

    @property
    def seeds(self) -> tuple[int, ...]:
        return (1, 1, 1) if self is SequenceKind.PADOVAN else (0, 1)

    def step(self, terms: list[int]) -> int:
        if self is SequenceKind.PADOVAN:
            return terms[-2] + terms[-3]
        return terms[-1] + terms[-2]


@dataclass
class TermCache:
    """Grow-only list of exact terms.  Readers always see a valid prefix."""

    kind: SequenceKind
    terms: list[int] = field(default_factory=list)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self) -> None:
        if not self.terms:
            self.terms = list(self.kind.seeds)

    def get(self, k: int) -> int:
        if k < 0:
            raise ValueError(f"index must be non-negative, got {k}")
        if k >= len(self.terms):
            with self._lock:
                terms = self.terms
                while len(terms) <= k:
                    terms.append(self.kind.step(terms))
        return self.terms[k]

    def prefix(self, n: int) -> list[int]:
        """The first n terms (indices 0 .. n-1)."""
        if n > 0:
            self.get(n - 1)
        return self.terms[:n]

    def audit(self, k: int) -> bool:
        """Recompute term k from the seeds and compare with the cache."""
        return recompute(self.kind, k) == self.get(k)


def recompute(kind: SequenceKind, k: int) -> int:
    terms = list(kind.seeds)
    while len(terms) <= k:
        terms.append(kind.step(terms))
    return terms[k]


_CACHES = {kind: TermCache(kind) for kind in SequenceKind}


def term(kind: SequenceKind, k: int) -> int:
    return _CACHES[kind].get(k)


def terms(kind: SequenceKind, n: int) -> list[int]:
    return _CACHES[kind].prefix(n)


def padovan(k: int) -> int:
    return term(SequenceKind.PADOVAN, k)


def fibonacci(k: int) -> int:
    return term(SequenceKind.FIBONACCI, k)


def _binet(kind: SequenceKind, k: int, prec: int) -> CertReal:
    c = compute_constants(prec)
    if kind is SequenceKind.FIBONACCI:
        return (c.delta ** k - c.eta ** k) / c.sqrt5
    # |b beta^k + c gamma^k| = 2 |Re(b beta^k)| <= 2 |b| |beta|^k
    dominant = c.a_coeff * c.alpha ** k
    tail = 2 * c.b_c_modulus * c.beta_gamma_modulus ** k
    return CertReal(dominant.lo, dominant.hi, prec) + CertReal((-tail).lo, tail.hi, prec)


def binet_enclosure(kind: SequenceKind, k: int, precision: int = START_PRECISION,
                    max_prec: int = MAX_PRECISION) -> CertReal:
    """Interval containing term(kind, k), built from the Binet formula.

    Precision is doubled until the interval is narrower than 1, which pins
    down the integer it encloses.
    """
    if k < 0:
        raise ValueError(f"index must be non-negative, got {k}")

    def attempt(prec: int) -> CertReal:
        enc = _binet(kind, k, prec)
        if enc.width >= 1:
            raise UndecidedError(f"Binet enclosure of width {float(enc.width):.3g}")
        return enc

    return escalate(attempt, max(precision, 64), max_prec)


@dataclass(frozen=True)
class GrowthViolation:
    k: int
    side: str  # "lower" or "upper"


def growth_bounds_report(kind: SequenceKind, k_min: int, k_max: int,
                         precision: int = START_PRECISION,
                         max_prec: int = MAX_PRECISION) -> list[GrowthViolation]:
    """Check root^(k-2) <= term_k <= root^(k-1) for k in [k_min, k_max].

    root is alpha for Padovan (valid for k >= 4) and delta for Fibonacci
    (valid for k >= 1).  Each comparison is certified; an undecided one
    escalates the precision for the whole range.
    """
    floor_k = 4 if kind is SequenceKind.PADOVAN else 1
    if k_min < floor_k:
        raise ValueError(f"{kind.value} growth bounds need k >= {floor_k}")

    def attempt(prec: int) -> list[GrowthViolation]:
        c = compute_constants(prec)
        root = c.alpha if kind is SequenceKind.PADOVAN else c.delta
        out = []
        if k_max < k_min:
            return out
        for k in range(k_min, k_max + 1):
            value = term(kind, k)
            # direct powers keep root^0 an exact point (equality at F_1, F_2)
            power, upper = root ** (k - 2), root ** (k - 1)
            if power.lo > value:
                out.append(GrowthViolation(k, "lower"))
            elif power.hi > value:
                raise UndecidedError(f"lower growth comparison at k={k}")
            if upper.hi < value:
                out.append(GrowthViolation(k, "upper"))
            elif upper.lo < value:
                raise UndecidedError(f"upper growth comparison at k={k}")
        return out

    return escalate(attempt, precision, max_prec)
