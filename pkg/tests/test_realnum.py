import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from pillai.realnum import (
    MINPOLY_SQRT5_A,
    CertReal,
    Ordering,
    PrecisionExhausted,
    UndecidedError,
    certified_compare,
    compute_constants,
    dist_to_nearest_int,
    escalate,
    height_from_minpoly,
    isolate_real_root,
)

PREC = st.sampled_from([64, 128, 192, 512])
fractions = st.fractions(min_value=-10 ** 60, max_value=10 ** 60, max_denominator=10 ** 30)
nonzero = fractions.filter(lambda x: x != 0)


def encloses(iv: CertReal, x: Fraction) -> bool:
    lo, hi = iv.fraction_bounds()
    return lo <= x <= hi


@given(fractions, fractions, PREC)
def test_add_sub_mul_enclose(x, y, prec):
    a, b = CertReal.exact(x, prec), CertReal.exact(y, prec)
    assert encloses(a + b, x + y)
    assert encloses(a - b, x - y)
    assert encloses(a * b, x * y)
    assert encloses(-a, -x)
    assert encloses(abs(a), abs(x))


@given(fractions, nonzero, PREC)
def test_division_encloses(x, y, prec):
    assert encloses(CertReal.exact(x, prec) / CertReal.exact(y, prec), x / y)
    assert encloses(CertReal.exact(y, prec).reciprocal(), 1 / y)


@given(st.fractions(min_value=-50, max_value=50, max_denominator=1000).filter(lambda x: x != 0),
       st.integers(min_value=-12, max_value=12), PREC)
def test_integer_powers_enclose(x, n, prec):
    assert encloses(CertReal.exact(x, prec) ** n, x ** n)


@given(st.fractions(min_value=Fraction(1, 10 ** 9), max_value=10 ** 40, max_denominator=10 ** 12),
       st.sampled_from([128, 256]))
@settings(deadline=None)
def test_transcendentals_enclose_mpmath(x, prec):
    iv = CertReal.exact(x, prec)
    with mpmath.workdps(200):
        v = mpmath.mpf(x.numerator) / x.denominator
        checks = [(iv.log(), mpmath.log(v)), (iv.sqrt(), mpmath.sqrt(v))]
        if x < 1000:
            checks.append((iv.exp(), mpmath.exp(v)))
        for enc, exact in checks:
            lo, hi = enc.fraction_bounds()
            assert mpmath.mpf(lo.numerator) / lo.denominator <= exact
            assert exact <= mpmath.mpf(hi.numerator) / hi.denominator


@given(st.integers(min_value=-10 ** 55, max_value=10 ** 55),
       st.fractions(min_value=0, max_value=1, max_denominator=10 ** 9), PREC)
def test_dist_to_nearest_int(n, f, prec):
    # the integer part is far beyond 53 bits on purpose
    x = n + f
    d = dist_to_nearest_int(CertReal.exact(x, prec))
    assert encloses(d, min(f, 1 - f))


def test_big_integer_floor_and_negation_are_exact():
    big = 10 ** 49 + 3
    x = CertReal.exact(big, 512) + Fraction(1, 4)
    assert x.floor() == big
    assert (-x).floor() == -big - 1
    assert encloses(dist_to_nearest_int(-x), Fraction(1, 4))


def test_floor_undecided_across_integer():
    with pytest.raises(UndecidedError):
        CertReal.from_bounds(Fraction(99, 100), Fraction(101, 100), 64).floor()


def test_certified_compare():
    third = CertReal.exact(1, 128) / 3
    assert certified_compare(third, Fraction(1, 3) + Fraction(1, 10 ** 30)) is Ordering.LESS
    assert certified_compare(2, 1) is Ordering.GREATER
    assert certified_compare(5, 5) is Ordering.EQUAL
    assert certified_compare(third, Fraction(1, 3)) is Ordering.UNDECIDED


def test_escalate_doubles_then_gives_up():
    seen = []

    def fn(p):
        seen.append(p)
        if p < 1024:
            raise UndecidedError("not yet")
        return p

    assert escalate(fn, 128, 4096) == 1024
    assert seen == [128, 256, 512, 1024]
    with pytest.raises(PrecisionExhausted):
        escalate(lambda p: (_ for _ in ()).throw(UndecidedError("never")), 64, 256)


def test_constants_against_mpmath():
    c = compute_constants(256)
    with mpmath.workdps(90):
        alpha = mpmath.findroot(lambda x: x ** 3 - x - 1, 1.3)
        delta = (1 + mpmath.sqrt(5)) / 2
        a = (1 + alpha) / (-alpha ** 2 + 3 * alpha + 1)
        # the complex roots beta, gamma satisfy |beta|^2 = 1/alpha
        beta_mod = 1 / mpmath.sqrt(alpha)
        for enc, ref in [(c.alpha, alpha), (c.delta, delta), (c.a_coeff, a),
                         (c.beta_gamma_modulus, beta_mod), (c.log_alpha, mpmath.log(alpha)),
                         (c.log_delta, mpmath.log(delta)), (c.sqrt5_a, mpmath.sqrt(5) * a)]:
            lo, hi = enc.fraction_bounds()
            assert mpmath.mpf(lo.numerator) / lo.denominator <= ref
            assert ref <= mpmath.mpf(hi.numerator) / hi.denominator
            assert enc.width < mpmath.mpf(10) ** -70
    assert 1.3247 < float(c.alpha) < 1.3248
    assert 0.7221 < float(c.a_coeff) < 0.7222


def test_constants_minimum_precision():
    with pytest.raises(ValueError):
        compute_constants(32)


def test_root_isolation():
    r = isolate_real_root((-2, 0, 1), 1, 2, 128)
    lo, hi = r.fraction_bounds()
    assert lo * lo < 2 < hi * hi
    assert r.width < Fraction(1, 10 ** 30)


def test_heights():
    log2 = math.log(2)
    assert abs(float(height_from_minpoly((-2, 1))) - log2) < 1e-15
    golden = height_from_minpoly((-1, -1, 1))
    assert abs(float(golden) - math.log((1 + math.sqrt(5)) / 2) / 2) < 1e-15
    # x^3 - x - 1 is monic with one root outside the unit disk
    plastic = height_from_minpoly((-1, -1, 0, 1))
    assert abs(float(plastic) - math.log(1.324717957244746) / 3) < 1e-15
    h = height_from_minpoly(MINPOLY_SQRT5_A)
    assert 1.195 < h.lo and h.hi < 1.215
    assert h.width < 1e-30


def test_height_independent_oracle():
    # (log 529 + sum of log max(1, |root|)) / 6 with mpmath roots
    with mpmath.workdps(60):
        roots = mpmath.polyroots([529, 0, -1265, 0, -250, 0, -125], maxsteps=200, extraprec=200)
        ref = (mpmath.log(529) + sum(mpmath.log(max(1, abs(r))) for r in roots)) / 6
    h = height_from_minpoly(MINPOLY_SQRT5_A, 192)
    lo, hi = h.fraction_bounds()
    with mpmath.workdps(60):
        assert mpmath.mpf(lo.numerator) / lo.denominator <= ref
        assert ref <= mpmath.mpf(hi.numerator) / hi.denominator
