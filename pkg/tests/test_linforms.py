import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from pillai import linforms
from pillai.realnum import CertReal


@pytest.fixture(scope="module")
def chain():
    return linforms.bound_chain()


def rel(x, ref):
    return abs(float(x) / float(ref) - 1)


def test_matveev_constant_matches_formula():
    with mpmath.workdps(40):
        ref = mpmath.mpf("1.4") * 30 ** 6 * mpmath.mpf(3) ** mpmath.mpf("4.5") * 36 * (1 + mpmath.log(6))
    c = linforms.matveev_constant(3, 6)
    assert rel(c, ref) < 1e-25
    assert rel(c, 1.43907e13) < 1e-5
    with pytest.raises(ValueError):
        linforms.matveev_constant(0, 6)


def test_instance_rejects_small_A():
    one = CertReal.exact(1, 128)
    with pytest.raises(ValueError):
        linforms.MatveevInstance("x", (one, one, CertReal.exact(Fraction(1, 10), 128)))
    with pytest.raises(ValueError):
        linforms.MatveevInstance("x", (one, one))


@pytest.mark.parametrize("field, printed", [
    ("lambda_coefficient", 8.45e13),
    ("case1_coefficient", 2.96e27),
    ("case2_coefficient", 1.97e27),
    ("final_coefficient", 2.08e41),
    ("n_absolute", 2.83e47),
])
def test_chain_matches_printed_values(chain, field, printed):
    assert rel(getattr(chain, field), printed) < 0.05


def test_chain_frozen_values(chain):
    # frozen from an independent mpmath recomputation of the chain
    assert rel(chain.lambda_coefficient, 8.4473834e13) < 1e-6
    assert rel(chain.case1_coefficient, 2.9609248e27) < 1e-6
    assert rel(chain.case2_coefficient, 1.9745613e27) < 1e-6
    assert rel(chain.final_coefficient, 2.0797154e41) < 1e-6
    assert chain.n_absolute == 284112077330981586547484520223478047260173180337


def test_absolute_bound_is_the_crossover(chain):
    coef = chain.final_coefficient.fraction_bounds()[1]
    with mpmath.workdps(80):
        c = mpmath.mpf(coef.numerator) / coef.denominator

        def g(n):
            return (n - 4) - c * (1 + mpmath.log(2 * n)) ** 3

        n = chain.n_absolute
        assert g(n) >= 0
        assert g(n - 1) < 0


def test_height_of_gamma1_case1():
    with pytest.raises(ValueError):
        linforms.height_bound_gamma1_case1(0)
    h = linforms.height_bound_gamma1_case1(10)
    # k log(delta) / 2 + log sqrt5 + log(23) / 3 + log 2
    ref = 10 * math.log((1 + 5 ** 0.5) / 2) / 2 + math.log(5 ** 0.5) + math.log(23) / 3 + math.log(2)
    assert rel(h, ref) < 1e-12


def brute(coef, exponent, offset):
    n = 1
    while not (n - offset >= coef * (1 + math.log(2 * n)) ** exponent):
        n += 1
    return n


@pytest.mark.parametrize("coef, exponent, offset", [
    (1, 0, 0), (5, 0, 3), (1000, 1, 0), (50, 2, 4), (7, 3, 4), (Fraction(3, 2), 3, 0), (1, 1, 0),
])
def test_derive_absolute_bound_brute_force(coef, exponent, offset):
    assert linforms.derive_absolute_bound(coef, exponent, offset) == brute(coef, exponent, offset)


@given(st.integers(min_value=1, max_value=400), st.integers(min_value=1, max_value=3),
       st.integers(min_value=0, max_value=10))
@settings(max_examples=30, deadline=None)
def test_derive_absolute_bound_property(coef, exponent, offset):
    assert linforms.derive_absolute_bound(coef, exponent, offset) == brute(coef, exponent, offset)


def test_derive_absolute_bound_errors():
    with pytest.raises(ValueError):
        linforms.derive_absolute_bound(0, 1, 0)
    with pytest.raises(ValueError):
        linforms.derive_absolute_bound(1, 4, 0)


def test_low_precision_bound_is_no_smaller(chain):
    low = linforms.bound_chain(64, 64)
    assert low.n_absolute >= chain.n_absolute
    assert rel(low.n_absolute, chain.n_absolute) < 1e-6


@pytest.mark.parametrize("n, n1, m, m1", [(10, 9, 8, 7), (300, 299, 500, 499), (1000, 20, 1500, 3)])
def test_linear_forms_nonzero(n, n1, m, m1):
    assert linforms.nonvanishing_spot_check(n, n1, m, m1)


def test_linear_forms_at_a_solution():
    # (m, n) = (19, 14) and (8, 13) both give c = -226, so F_14 - F_13 = P_19 - P_8;
    # Lambda3 measures exactly this identity and is tiny but the check must not crash
    res = linforms.nonvanishing_spot_check(14, 13, 19, 8)
    assert set(res.values) == {"Lambda", "Lambda1", "Lambda2", "Lambda3"}
    with pytest.raises(ValueError):
        linforms.nonvanishing_spot_check(5, 5, 3, 2)
