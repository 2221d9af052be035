"""Certified arbitrary-precision interval reals and the algebraic constants
of the Padovan and Fibonacci recurrences.

Intervals are backed by MPFR (through gmpy2), whose elementary functions are
correctly rounded in every rounding mode.  Lower endpoints are always computed
rounding toward -inf and upper endpoints toward +inf, so every operation
returns an enclosure of the exact result.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence, TypeVar, Union

import gmpy2
import mpmath
from gmpy2 import RoundDown, RoundUp, mpfr, mpq

START_PRECISION = 192
MAX_PRECISION = 16384

Number = Union[int, Fraction, "CertReal"]
T = TypeVar("T")


class UndecidedError(ArithmeticError):
    """An interval is too wide to decide a sign, a floor or a comparison."""


class PrecisionExhausted(ArithmeticError):
    """Raised when precision escalation reaches its cap without a decision."""


@lru_cache(maxsize=None)
def _contexts(prec: int) -> tuple[gmpy2.context, gmpy2.context]:
    return (gmpy2.context(precision=prec, round=RoundDown),
            gmpy2.context(precision=prec, round=RoundUp))


def _as_mpq(x: int | Fraction) -> mpq:
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


def _mpf_to_fraction(x: mpmath.mpf) -> Fraction:
    man, exp = mpmath.mpf(x).man_exp
    return Fraction(int(man) * 2 ** exp) if exp >= 0 else Fraction(int(man), 2 ** -exp)


def _to_mpmath(x: mpfr) -> mpmath.mpf:
    man, exp = x.as_mantissa_exp()
    with mpmath.workprec(max(53, int(man).bit_length())):
        return +mpmath.mpf((int(man), int(exp)))


def _to_fraction(x: mpfr) -> Fraction:
    num, den = x.as_integer_ratio()
    return Fraction(int(num), int(den))


@dataclass(frozen=True, slots=True)
class CertReal:
    """A closed interval [lo, hi] known to contain some real number."""

    lo: mpfr
    hi: mpfr
    prec: int

    def __post_init__(self) -> None:
        if not self.lo <= self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    # -- construction -----------------------------------------------------

    @classmethod
    def exact(cls, x: int | Fraction, prec: int) -> "CertReal":
        """Tightest enclosure of a rational at the given precision."""
        down, up = _contexts(prec)
        q = _as_mpq(x)
        return cls(mpfr(q, prec, down), mpfr(q, prec, up), prec)

    @classmethod
    def from_bounds(cls, lo: int | Fraction, hi: int | Fraction, prec: int) -> "CertReal":
        down, up = _contexts(prec)
        return cls(mpfr(_as_mpq(lo), prec, down), mpfr(_as_mpq(hi), prec, up), prec)

    @classmethod
    def from_decimal(cls, text: str, prec: int) -> "CertReal":
        return cls.exact(Fraction(text), prec)

    def _coerce(self, other: Number) -> "CertReal":
        if isinstance(other, CertReal):
            return other
        if isinstance(other, (int, Fraction)):
            return CertReal.exact(other, self.prec)
        return NotImplemented  # type: ignore[return-value]

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: Number) -> "CertReal":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        p = max(self.prec, o.prec)
        down, up = _contexts(p)
        return CertReal(down.add(self.lo, o.lo), up.add(self.hi, o.hi), p)

    __radd__ = __add__

    def __neg__(self) -> "CertReal":
        return CertReal(_neg(self.hi), _neg(self.lo), self.prec)

    def __sub__(self, other: Number) -> "CertReal":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        p = max(self.prec, o.prec)
        down, up = _contexts(p)
        return CertReal(down.sub(self.lo, o.hi), up.sub(self.hi, o.lo), p)

    def __rsub__(self, other: Number) -> "CertReal":
        return self._coerce(other) - self

    def __mul__(self, other: Number) -> "CertReal":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        p = max(self.prec, o.prec)
        down, up = _contexts(p)
        if self.lo >= 0 and o.lo >= 0:
            return CertReal(down.mul(self.lo, o.lo), up.mul(self.hi, o.hi), p)
        pairs = ((self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi))
        lo = min(down.mul(x, y) for x, y in pairs)
        hi = max(up.mul(x, y) for x, y in pairs)
        return CertReal(lo, hi, p)

    __rmul__ = __mul__

    def reciprocal(self) -> "CertReal":
        if self.lo <= 0 <= self.hi:
            raise UndecidedError("reciprocal of an interval containing 0")
        down, up = _contexts(self.prec)
        return CertReal(down.div(1, self.hi), up.div(1, self.lo), self.prec)

    def __truediv__(self, other: Number) -> "CertReal":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o.lo <= 0 <= o.hi:
            raise UndecidedError("division by an interval containing 0")
        p = max(self.prec, o.prec)
        down, up = _contexts(p)
        pairs = ((self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi))
        lo = min(down.div(x, y) for x, y in pairs)
        hi = max(up.div(x, y) for x, y in pairs)
        return CertReal(lo, hi, p)

    def __rtruediv__(self, other: Number) -> "CertReal":
        return self._coerce(other) / self

    def __pow__(self, n: int) -> "CertReal":
        if not isinstance(n, int):
            return NotImplemented
        if n == 0:
            return CertReal.exact(1, self.prec)
        if n < 0:
            return (self ** (-n)).reciprocal()
        down, up = _contexts(self.prec)
        if self.lo >= 0:
            return CertReal(down.pow(self.lo, n), up.pow(self.hi, n), self.prec)
        if n % 2 == 1:
            return CertReal(down.pow(self.lo, n), up.pow(self.hi, n), self.prec)
        if self.hi <= 0:
            return CertReal(down.pow(self.hi, n), up.pow(self.lo, n), self.prec)
        return CertReal(mpfr(0), max(up.pow(self.lo, n), up.pow(self.hi, n)), self.prec)

    def __abs__(self) -> "CertReal":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return CertReal(mpfr(0), max(_neg(self.lo), self.hi), self.prec)

    def sqrt(self) -> "CertReal":
        if self.lo < 0:
            raise UndecidedError("sqrt of an interval reaching below 0")
        down, up = _contexts(self.prec)
        return CertReal(down.sqrt(self.lo), up.sqrt(self.hi), self.prec)

    def log(self) -> "CertReal":
        if self.lo <= 0:
            raise UndecidedError("log of an interval reaching 0")
        down, up = _contexts(self.prec)
        return CertReal(down.log(self.lo), up.log(self.hi), self.prec)

    def exp(self) -> "CertReal":
        down, up = _contexts(self.prec)
        return CertReal(down.exp(self.lo), up.exp(self.hi), self.prec)

    def max(self, other: Number) -> "CertReal":
        o = self._coerce(other)
        return CertReal(max(self.lo, o.lo), max(self.hi, o.hi), max(self.prec, o.prec))

    def min(self, other: Number) -> "CertReal":
        o = self._coerce(other)
        return CertReal(min(self.lo, o.lo), min(self.hi, o.hi), max(self.prec, o.prec))

    # -- queries ----------------------------------------------------------

    @property
    def width(self) -> mpfr:
        return _contexts(self.prec)[1].sub(self.hi, self.lo)

    @property
    def mid(self) -> mpfr:
        down, _ = _contexts(self.prec + 1)
        return down.div(down.add(self.lo, self.hi), 2)

    def contains(self, x: Number) -> bool:
        if isinstance(x, CertReal):
            return self.lo <= x.lo and x.hi <= self.hi
        q = _as_mpq(x)
        return self.lo <= q <= self.hi

    def overlaps(self, other: "CertReal") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def is_positive(self) -> bool:
        return self.lo > 0

    def is_negative(self) -> bool:
        return self.hi < 0

    def excludes_zero(self) -> bool:
        return self.lo > 0 or self.hi < 0

    def floor(self) -> int:
        """floor() of every member, or UndecidedError if members disagree."""
        a, b = _floor(self.lo), _floor(self.hi)
        if a != b:
            raise UndecidedError("interval straddles an integer")
        return a

    def fraction_bounds(self) -> tuple[Fraction, Fraction]:
        return _to_fraction(self.lo), _to_fraction(self.hi)

    def with_precision(self, prec: int) -> "CertReal":
        down, up = _contexts(prec)
        return CertReal(mpfr(self.lo, prec, down), mpfr(self.hi, prec, up), prec)

    def to_decimal(self, digits: int = 20) -> str:
        """Midpoint in scientific notation, `digits` significant digits."""
        with mpmath.workprec(self.prec + 8):
            return mpmath.nstr(_to_mpmath(self.mid), digits, min_fixed=-4, max_fixed=8)

    def __float__(self) -> float:
        return float(self.mid)

    def __repr__(self) -> str:
        lo = mpmath.nstr(_to_mpmath(self.lo), 12)
        hi = mpmath.nstr(_to_mpmath(self.hi), 12)
        return f"CertReal([{lo}, {hi}], prec={self.prec})"


def _neg(x: mpfr) -> mpfr:
    # negation is exact only when done at the operand's own precision
    return gmpy2.context(precision=x.precision).minus(x)


def _floor(x: mpfr) -> int:
    # gmpy2.floor and math.floor round through the 53-bit global context
    num, den = x.as_integer_ratio()
    return int(num) // int(den)


def dist_to_nearest_int(x: CertReal) -> CertReal:
    """Enclosure of ||x||, the distance from x to the nearest integer."""
    down, up = _contexts(x.prec)
    half = mpfr("0.5")
    if up.sub(x.hi, x.lo) >= 1:
        return CertReal(mpfr(0), half, x.prec)
    n = gmpy2.mpz(_floor(x.lo))
    f_lo = down.sub(x.lo, n)      # in [0, 1)
    f_hi = up.sub(x.hi, n)        # in [f_lo, 2)

    def dist(f: mpfr, ctx: gmpy2.context) -> mpfr:
        if f >= 1:
            f = ctx.sub(f, 1)
        return f if f <= half else ctx.sub(1, f)

    if f_lo == 0 or f_hi >= 1:
        lo = mpfr(0)
    else:
        lo = min(dist(f_lo, down), dist(f_hi, down))
    if f_lo <= half <= f_hi or f_lo <= 1.5 <= f_hi:
        hi = half
    else:
        hi = max(dist(f_lo, up), dist(f_hi, up))
    return CertReal(max(lo, mpfr(0)), hi, x.prec)


class Ordering(enum.Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1
    UNDECIDED = None


def certified_compare(x: Number, y: Number, prec: int = START_PRECISION) -> Ordering:
    """Order x and y only when the enclosures settle it."""
    if not isinstance(x, CertReal):
        x = CertReal.exact(x, prec)
    if not isinstance(y, CertReal):
        y = CertReal.exact(y, prec)
    if x.hi < y.lo:
        return Ordering.LESS
    if x.lo > y.hi:
        return Ordering.GREATER
    if x.lo == x.hi == y.lo == y.hi:
        return Ordering.EQUAL
    return Ordering.UNDECIDED


def escalate(fn: Callable[[int], T], prec: int = START_PRECISION,
             max_prec: int = MAX_PRECISION) -> T:
    """Call fn(prec), doubling prec on UndecidedError up to max_prec."""
    while True:
        try:
            return fn(prec)
        except UndecidedError as exc:
            if prec >= max_prec:
                raise PrecisionExhausted(f"undecided at {prec} bits: {exc}") from exc
            prec = min(2 * prec, max_prec)


def poly_eval(coeffs: Sequence[int], x: CertReal) -> CertReal:
    """Horner evaluation; coefficients in ascending order."""
    acc = CertReal.exact(coeffs[-1], x.prec)
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


def _poly_eval_exact(coeffs: Sequence[int], x: Fraction) -> Fraction:
    acc = Fraction(coeffs[-1])
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


def isolate_real_root(coeffs: Sequence[int], lo: int, hi: int, prec: int) -> CertReal:
    """Enclose the unique root of an increasing polynomial on [lo, hi].

    The caller guarantees monotonicity on [lo, hi]; the sign change at the
    returned endpoints is checked in exact rational arithmetic.
    """
    f_lo = _poly_eval_exact(coeffs, Fraction(lo))
    f_hi = _poly_eval_exact(coeffs, Fraction(hi))
    if not (f_lo < 0 < f_hi):
        raise ArithmeticError(f"no sign change of {coeffs} on [{lo}, {hi}]")
    mp_coeffs = list(reversed(coeffs))
    with mpmath.workprec(prec + 32):
        r = mpmath.findroot(lambda t: mpmath.polyval(mp_coeffs, t), (lo + hi) / 2)
        r = _mpf_to_fraction(r)
    step = Fraction(1, 2 ** (prec - 2))
    for _ in range(8):
        a, b = max(Fraction(lo), r - step), min(Fraction(hi), r + step)
        if _poly_eval_exact(coeffs, a) < 0 < _poly_eval_exact(coeffs, b):
            return CertReal.from_bounds(a, b, prec)
        step *= 16
    raise ArithmeticError(f"root isolation failed for {coeffs}")


PADOVAN_CHARPOLY = (-1, -1, 0, 1)          # x^3 - x - 1
FIBONACCI_CHARPOLY = (-1, -1, 1)           # x^2 - x - 1
MINPOLY_A = (-1, 6, -23, 23)               # 23x^3 - 23x^2 + 6x - 1
MINPOLY_SQRT5_A = (-125, 0, -250, 0, -1265, 0, 529)


@dataclass(frozen=True)
class AlgebraicConstants:
    precision: int
    alpha: CertReal
    beta_gamma_modulus: CertReal
    a_coeff: CertReal
    b_c_modulus: CertReal
    delta: CertReal
    eta: CertReal
    sqrt5: CertReal
    log_alpha: CertReal
    log_delta: CertReal
    minpoly_a: tuple[int, ...] = MINPOLY_A
    minpoly_sqrt5a: tuple[int, ...] = MINPOLY_SQRT5_A

    @property
    def sqrt5_a(self) -> CertReal:
        return self.sqrt5 * self.a_coeff


@lru_cache(maxsize=32)
def compute_constants(precision: int = START_PRECISION) -> AlgebraicConstants:
    """Certified enclosures of alpha, delta and the Binet coefficients."""
    if precision < 64:
        raise ValueError("precision must be at least 64 bits")
    # 3x^2 - 1 > 0 on [1, 2], so x^3 - x - 1 has a single root there
    alpha = isolate_real_root(PADOVAN_CHARPOLY, 1, 2, precision)
    sqrt5 = CertReal.exact(5, precision).sqrt()
    delta = (sqrt5 + 1) / 2
    eta = (1 - sqrt5) / 2
    a_coeff = (alpha + 1) / (3 * alpha + 1 - alpha ** 2)
    # a*b*c = 1/23 from the minimal polynomial of a, and b = conj(c)
    b_c_modulus = (1 / (23 * a_coeff)).sqrt()
    return AlgebraicConstants(
        precision=precision,
        alpha=alpha,
        beta_gamma_modulus=alpha.sqrt().reciprocal(),
        a_coeff=a_coeff,
        b_c_modulus=b_c_modulus,
        delta=delta,
        eta=eta,
        sqrt5=sqrt5,
        log_alpha=alpha.log(),
        log_delta=delta.log(),
    )


def _root_disks(coeffs: Sequence[int], wp: int) -> list[tuple[mpmath.mpc, mpmath.mpf]]:
    """Approximate roots with inclusion radii (Smith's bound, padded for
    rounding).  Disjoint disks each hold exactly one root."""
    d = len(coeffs) - 1
    desc = [int(c) for c in reversed(coeffs)]
    with mpmath.workprec(wp):
        roots = mpmath.polyroots(desc, maxsteps=200, extraprec=wp)
        roots = [mpmath.mpc(r) for r in roots]
        tol = mpmath.ldexp(1, -(wp // 2))
        disks = []
        for j, z in enumerate(roots):
            fz = abs(mpmath.polyval(desc, z))
            scale = sum(abs(c) * abs(z) ** i for i, c in enumerate(reversed(desc)))
            fz += scale * (d + 1) * mpmath.ldexp(1, -wp + 4)
            denom = abs(desc[0])
            for i, w in enumerate(roots):
                if i != j:
                    denom *= abs(z - w)
            if denom == 0:
                raise UndecidedError("coincident root approximations")
            r = d * fz / denom * (1 + tol) + tol * mpmath.ldexp(1, -(wp // 2))
            disks.append((z, r))
    for i in range(d):
        for j in range(i + 1, d):
            zi, ri = disks[i]
            zj, rj = disks[j]
            if abs(zi - zj) <= ri + rj:
                raise UndecidedError("root inclusion disks overlap")
    return disks


def height_from_minpoly(coeffs: Sequence[int], precision: int = START_PRECISION,
                        max_prec: int = MAX_PRECISION) -> CertReal:
    """Absolute logarithmic height of a root of an irreducible integer
    polynomial (coefficients ascending).

    log max(1, |z|) is continuous in |z|, so a root sitting on the unit
    circle only widens the enclosure instead of blocking it.
    """
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) < 2:
        raise ValueError("polynomial must have degree at least 1")
    d = len(coeffs) - 1

    def attempt(prec: int) -> CertReal:
        total = CertReal.exact(abs(coeffs[-1]), prec).log()
        if d == 1:
            root = CertReal.exact(Fraction(-coeffs[0], coeffs[1]), prec)
            return (total + abs(root).max(1).log()) / d
        wp = 2 * prec + 64
        for z, r in _root_disks(coeffs, wp):
            with mpmath.workprec(wp):
                m = abs(z)
                lo = _mpf_to_fraction(m - r)
                hi = _mpf_to_fraction(m + r)
            modulus = CertReal.from_bounds(max(lo, Fraction(0)), hi, prec)
            total = total + modulus.max(1).log()
        return total / d

    return escalate(attempt, precision, max_prec)
