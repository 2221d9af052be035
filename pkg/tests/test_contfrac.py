import warnings
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from pillai import contfrac
from pillai.contfrac import IrrationalitySuspicion, NotReached
from pillai.realnum import CertReal, compute_constants
from pillai.reduction import PRINTED_CONVERGENTS, tau_alpha_over_delta, tau_delta_over_alpha

PREFIX = [1, 1, 2, 2, 6, 2, 1, 2, 1, 2, 1, 1, 11, 1, 2, 3, 1, 7, 37, 4]


def mpmath_quotients(x, count):
    out = []
    for _ in range(count):
        a = int(mpmath.floor(x))
        out.append(a)
        x = 1 / (x - a)
    return out


@pytest.fixture(scope="module")
def oracle():
    with mpmath.workdps(400):
        alpha = mpmath.findroot(lambda t: t ** 3 - t - 1, mpmath.mpf("1.3247"))
        delta = (1 + mpmath.sqrt(5)) / 2
        tau = mpmath.log(delta) / mpmath.log(alpha)
        return {"delta-over-alpha": mpmath_quotients(tau, 120),
                "alpha-over-delta": mpmath_quotients(1 / tau, 120)}


def test_known_prefix():
    pq = contfrac.expand(tau_delta_over_alpha, 20, 512)
    assert list(pq.quotients) == PREFIX
    rec = contfrac.expand(tau_alpha_over_delta, 21, 512)
    assert list(rec.quotients) == [0] + PREFIX


@pytest.mark.parametrize("name", sorted(PRINTED_CONVERGENTS))
def test_against_mpmath_oracle(oracle, name):
    src = {"delta-over-alpha": tau_delta_over_alpha, "alpha-over-delta": tau_alpha_over_delta}[name]
    pq = contfrac.expand(src, 120, 512)
    assert list(pq.quotients) == oracle[name]
    assert not pq.truncated


@pytest.mark.parametrize("name", sorted(PRINTED_CONVERGENTS))
def test_printed_pairs_are_convergents(name):
    src = {"delta-over-alpha": tau_delta_over_alpha, "alpha-over-delta": tau_alpha_over_delta}[name]
    convs = contfrac.convergents(contfrac.expand(src, 110, 512))
    assert contfrac.locate(convs, *PRINTED_CONVERGENTS[name]) == 98


def test_determinant_identity():
    convs = contfrac.convergents(contfrac.expand(tau_delta_over_alpha, 110, 512))
    for prev, cur in zip(convs, convs[1:]):
        assert cur.p * prev.q - prev.p * cur.q == (-1) ** (cur.index - 1)


def test_convergents_bracket_the_value():
    tau = tau_delta_over_alpha(512)
    convs = contfrac.convergents(contfrac.expand(tau_delta_over_alpha, 60, 512))
    lo, hi = tau.fraction_bounds()
    for c in convs[1:]:
        err = abs(c.value - lo)
        assert err < Fraction(1, c.q * c.q)
        assert (c.value > hi) == (c.index % 2 == 1)


def test_rationals_terminate():
    pq = contfrac.expand(Fraction(355, 113), 10)
    assert pq.quotients == (3, 7, 16) and pq.terminated and not pq.truncated
    assert contfrac.expand(7, 5).quotients == (7,)
    assert contfrac.expand(Fraction(-7, 3), 5).quotients == (-3, 1, 2)


@given(st.fractions(min_value=-1000, max_value=1000, max_denominator=10 ** 12))
def test_rational_roundtrip(x):
    pq = contfrac.expand(x, 200)
    assert pq.terminated
    assert contfrac.convergents(pq)[-1].value == x


def test_quadratic_irrationals():
    c = compute_constants(256)
    assert set(contfrac.expand(c.delta, 60).quotients) == {1}
    sqrt2 = lambda p: CertReal.exact(2, p).sqrt()  # noqa: E731
    assert contfrac.expand(sqrt2, 40).quotients == (1,) + (2,) * 39


def test_precision_cap_truncates():
    pq = contfrac.expand(tau_delta_over_alpha, 110, 64, 64)
    assert pq.truncated
    assert 0 < len(pq) < 110
    assert list(pq.quotients) == [1, 1, 2, 2, 6, 2, 1, 2, 1, 2, 1, 1, 11, 1, 2, 3, 1, 7, 37][:len(pq)]


def test_large_quotient_warns():
    x = CertReal.exact(Fraction(1, 3) + Fraction(1, 10 ** 40), 512)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        contfrac.expand(x, 4)
    assert any(issubclass(w.category, IrrationalitySuspicion) for w in caught)


def test_first_convergent_exceeding():
    convs = contfrac.convergents([1, 2, 2, 2, 2])
    assert contfrac.first_convergent_exceeding(convs, 5).q == 12
    with pytest.raises(NotReached):
        contfrac.first_convergent_exceeding(convs, 10 ** 6)
    with pytest.raises(ValueError):
        contfrac.convergents([])
    with pytest.raises(ValueError):
        contfrac.expand(1, 0)
