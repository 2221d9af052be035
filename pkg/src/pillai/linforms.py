"""Matveev lower bounds for the four linear forms and the absolute bound on n.

Every A_j factor of the form coefficient * (1 + log 2n)^j is carried as a
(coefficient, j) pair, so each stage of the chain keeps the shape
coefficient * (1 + log 2n)^e until the closing inequality is solved.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .realnum import (
    MAX_PRECISION,
    START_PRECISION,
    CertReal,
    PrecisionExhausted,
    UndecidedError,
    compute_constants,
    escalate,
    height_from_minpoly,
)

A_FLOOR = Fraction(16, 100)
SEARCH_LIMIT_BITS = 1024

# Values printed in the source derivation, used as floors for the A_1
# factors (A_j only has to be an upper bound for D*h) and as report targets.
PRINTED = {
    "A1_lambda": Fraction("7.23"),
    "A1_lambda1": Fraction("2.53e14"),
    "A1_lambda2": Fraction("1.69e14"),
    "A1_lambda3": Fraction("1.78e28"),
    "coef_lambda": Fraction("8.45e13"),
    "h_case1": Fraction("4.22e13"),
    "h_case2_intermediate": Fraction("9.51e13"),
    "h_case2": Fraction("2.82e13"),
    "coef_lambda1": Fraction("2.96e27"),
    "coef_lambda2": Fraction("1.97e27"),
    "h_lambda3": Fraction("2.47e27"),
    "coef_lambda3": Fraction("2.08e41"),
    "n_absolute": Fraction("2.83e47"),
    "h_sqrt5a": Fraction("1.204"),
}


def matveev_constant(s: int, D: int, prec: int = START_PRECISION) -> CertReal:
    """C(s, D) = 1.4 * 30^(s+3) * s^4.5 * D^2 * (1 + log D)."""
    if s < 1 or D < 1:
        raise ValueError("s and D must be positive")
    s_pow = CertReal.exact(s ** 4, prec) * CertReal.exact(s, prec).sqrt()
    one_plus_log_d = CertReal.exact(D, prec).log() + 1
    return CertReal.exact(Fraction(7, 5) * 30 ** (s + 3) * D ** 2, prec) * s_pow * one_plus_log_d


@dataclass(frozen=True)
class MatveevInstance:
    """Data of one application of Matveev's bound with B = 2n.

    log_powers[j] is the power of (1 + log 2n) that multiplies A[j].
    """

    label: str
    A: tuple[CertReal, ...]
    log_powers: tuple[int, ...] = (0, 0, 0)
    s: int = 3
    D: int = 6

    def __post_init__(self) -> None:
        if len(self.A) != self.s or len(self.log_powers) != self.s:
            raise ValueError("need one A_j and one log power per algebraic number")
        for a in self.A:
            if a.lo < A_FLOOR:
                raise ValueError(f"A_j = {a} is below the 0.16 floor")

    @property
    def log_exponent(self) -> int:
        """Total power of (1 + log 2n) in the lower bound exponent."""
        return 1 + sum(self.log_powers)


def lower_bound_coefficient(inst: MatveevInstance) -> CertReal:
    """C(s, D) * A_1 * ... * A_s, the coefficient of (1 + log 2n)^e in
    -log|Lambda|."""
    prec = max(a.prec for a in inst.A)
    out = matveev_constant(inst.s, inst.D, prec)
    for a in inst.A:
        out = out * a
    return out


def _consts_tail(prec: int) -> CertReal:
    """log sqrt5 + (log 23)/3 + log 2: heights of sqrt5, a and the +-1 split."""
    c = compute_constants(prec)
    return (c.sqrt5.log() + CertReal.exact(23, prec).log() / 3
            + CertReal.exact(2, prec).log())


def height_bound_gamma1_case1(k: int, prec: int = START_PRECISION) -> CertReal:
    """(k/2) log delta + log sqrt5 + (log 23)/3 + log 2, bounding the height
    of (delta^k - 1)/(sqrt5 a)."""
    if k < 1:
        raise ValueError(f"gap k must be positive, got {k}")
    c = compute_constants(prec)
    return c.log_delta * Fraction(k, 2) + _consts_tail(prec)


@dataclass(frozen=True)
class ChainRow:
    name: str
    value: CertReal
    printed: Fraction | None
    note: str = ""

    @property
    def deviation(self) -> float | None:
        if self.printed is None:
            return None
        return float(self.value.mid) / float(self.printed) - 1


@dataclass(frozen=True)
class BoundChain:
    lambda_coefficient: CertReal
    case1_coefficient: CertReal
    case2_coefficient: CertReal
    final_coefficient: CertReal
    n_absolute: int
    instances: tuple[MatveevInstance, ...]
    rows: tuple[ChainRow, ...] = field(default=())


def _instance(label: str, a1: CertReal, a1_power: int, prec: int) -> MatveevInstance:
    c = compute_constants(prec)
    a2 = c.log_delta * 3    # 6 h(delta)
    a3 = c.log_alpha * 2    # 6 h(alpha)
    return MatveevInstance(label, (a1, a2, a3), (a1_power, 0, 0))


def _at_least(recomputed: CertReal, printed: Fraction) -> CertReal:
    return recomputed.max(CertReal.exact(printed, recomputed.prec))


def bound_chain(prec: int = START_PRECISION, max_prec: int = MAX_PRECISION) -> BoundChain:
    """Recompute the Lambda, Lambda_1, Lambda_2, Lambda_3 coefficients and the
    absolute bound on n.

    Each A_1 is max(printed value, recomputed D*h bound): both are valid
    upper bounds for D*h(gamma_1), and the larger one is kept.
    """
    c = compute_constants(prec)
    D = 6
    tail = _consts_tail(prec)
    rows: list[ChainRow] = []

    cs = matveev_constant(3, D, prec)
    rows.append(ChainRow("C(3,6)", cs, None))

    h_s5a = height_from_minpoly(c.minpoly_sqrt5a, prec, max_prec)
    rows.append(ChainRow("h(sqrt5*a)", h_s5a, PRINTED["h_sqrt5a"]))
    a1 = _at_least(h_s5a * D, PRINTED["A1_lambda"])
    rows.append(ChainRow("A1 (Lambda)", a1, PRINTED["A1_lambda"]))
    lam = _instance("Lambda", a1, 0, prec)
    lam_coef = lower_bound_coefficient(lam)
    rows.append(ChainRow("Lambda coefficient", lam_coef, PRINTED["coef_lambda"],
                         "min{(n-n1) log delta, (m-m1) log alpha} < coef (1+log 2n)"))

    # Case 1: h <= (n-n1)(log delta)/2 + tail, with (n-n1) log delta < lam_coef (1+log 2n)
    h1 = lam_coef / 2 + tail
    rows.append(ChainRow("h(gamma1) case 1", h1, PRINTED["h_case1"]))
    a1_case1 = _at_least(h1 * D, PRINTED["A1_lambda1"])
    rows.append(ChainRow("A1 (Lambda1)", a1_case1, PRINTED["A1_lambda1"]))
    lam1 = _instance("Lambda1", a1_case1, 1, prec)
    case1 = lower_bound_coefficient(lam1)
    rows.append(ChainRow("Lambda1 coefficient", case1, PRINTED["coef_lambda1"]))

    # Case 2: h(alpha^k - 1) <= k (log alpha)/3 + log 2 with k log alpha < lam_coef (1+log 2n)
    h_inner = lam_coef / 3 + CertReal.exact(2, prec).log()
    rows.append(ChainRow("h(alpha^(m-m1)-1) case 2", h_inner,
                         PRINTED["h_case2_intermediate"],
                         "printed 9.51e13 disagrees with its own follow-up 2.82e13"))
    h2 = h_inner + CertReal.exact(23, prec).log() / 3 + c.sqrt5.log()
    rows.append(ChainRow("h(gamma1) case 2", h2, PRINTED["h_case2"]))
    a1_case2 = _at_least(h2 * D, PRINTED["A1_lambda2"])
    rows.append(ChainRow("A1 (Lambda2)", a1_case2, PRINTED["A1_lambda2"]))
    lam2 = _instance("Lambda2", a1_case2, 1, prec)
    case2 = lower_bound_coefficient(lam2)
    rows.append(ChainRow("Lambda2 coefficient", case2, PRINTED["coef_lambda2"]))

    # Lambda3: both gaps below max(case1, case2) (1+log 2n)^2
    big = case1.max(case2)
    h3 = big * Fraction(5, 6) + tail
    rows.append(ChainRow("h(gamma1) Lambda3", h3, PRINTED["h_lambda3"]))
    a1_l3 = _at_least(h3 * D, PRINTED["A1_lambda3"])
    rows.append(ChainRow("A1 (Lambda3)", a1_l3, PRINTED["A1_lambda3"],
                         "6 x 2.47e27 is 1.48e28; the larger printed 1.78e28 is kept"))
    lam3 = _instance("Lambda3", a1_l3, 2, prec)
    final = lower_bound_coefficient(lam3)
    rows.append(ChainRow("Lambda3 coefficient", final, PRINTED["coef_lambda3"],
                         "(n-4) < coef (1+log 2n)^3"))

    n_abs = derive_absolute_bound(final, 3, 4, prec, max_prec)
    rows.append(ChainRow("absolute bound on n", CertReal.exact(n_abs, prec),
                         PRINTED["n_absolute"]))
    return BoundChain(lam_coef, case1, case2, final, n_abs, (lam, lam1, lam2, lam3),
                      tuple(rows))


def derive_absolute_bound(coefficient: CertReal | Fraction | int, exponent: int,
                          offset: int, prec: int = START_PRECISION,
                          max_prec: int = MAX_PRECISION) -> int:
    """Least N with n - offset >= coefficient * (1 + log 2n)^exponent for
    every n >= N.

    g(n) = n - offset - coef (1 + log 2n)^e is convex for n >= 2, so the
    failing set is an interval; the crossover is found by bisection with
    certified sign decisions.  A decision that stays undecided at max_prec
    is treated as failing, which can only move N up.
    """
    if isinstance(coefficient, CertReal):
        coef_q = None
        coef_iv = coefficient
    else:
        coef_q = Fraction(coefficient)
        coef_iv = None
    if (coef_iv is not None and coef_iv.lo <= 0) or (coef_q is not None and coef_q <= 0):
        raise ValueError("coefficient must be positive")
    if exponent not in (0, 1, 2, 3):
        raise ValueError("exponent must be 0, 1, 2 or 3")

    def coef(p: int) -> CertReal:
        return coef_iv.with_precision(max(p, coef_iv.prec)) if coef_iv else CertReal.exact(coef_q, p)

    if exponent == 0:
        c = coef(prec)
        hi = c.fraction_bounds()[1] + offset
        return max(1, -((-hi) // 1))

    def satisfied(n: int) -> bool:
        def attempt(p: int) -> bool:
            rhs = coef(p) * (CertReal.exact(2 * n, p).log() + 1) ** exponent
            g = CertReal.exact(n - offset, p) - rhs
            if g.lo >= 0:
                return True
            if g.hi < 0:
                return False
            raise UndecidedError("crossover undecided")
        try:
            return escalate(attempt, prec, max_prec)
        except ArithmeticError:
            return False

    def slope_positive(n: int) -> bool:
        # f(x) = coef (1 + log 2x)^e has derivative e coef (1 + log 2x)^(e-1) / x,
        # decreasing for x >= 2, so f' (n) < 1 gives g(n+1) > g(n) onwards
        def attempt(p: int) -> bool:
            lhs = coef(p) * (CertReal.exact(2 * n, p).log() + 1) ** (exponent - 1) * exponent
            if lhs.hi < n:
                return True
            if lhs.lo >= n:
                return False
            raise UndecidedError("slope undecided")
        try:
            return escalate(attempt, prec, max_prec)
        except ArithmeticError:
            return False

    def grow(ok: Callable[[int], bool], start: int) -> tuple[int, int]:
        lo, hi = start, start
        while not ok(hi):
            if hi.bit_length() > SEARCH_LIMIT_BITS:
                raise PrecisionExhausted(f"no certified crossover below 2^{SEARCH_LIMIT_BITS}")
            lo, hi = hi, hi * 2
        return lo, hi

    # locate a point past the minimum of g on [2, inf)
    lo, hi = grow(slope_positive, 2)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if slope_positive(mid):
            hi = mid
        else:
            lo = mid
    turn = hi   # g decreases up to here and increases afterwards
    if satisfied(turn):
        return 1 if satisfied(1) else 2
    lo, hi = grow(satisfied, turn)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if satisfied(mid):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class NonvanishingResult:
    values: dict[str, CertReal]
    undecided: tuple[str, ...]

    @property
    def all_nonzero(self) -> bool:
        return not self.undecided

    def __bool__(self) -> bool:
        return self.all_nonzero


def linear_forms(n: int, n1: int, m: int, m1: int, prec: int) -> dict[str, CertReal]:
    """Interval values of Lambda, Lambda1, Lambda2, Lambda3 at given indices."""
    c = compute_constants(prec)
    s5a = c.sqrt5_a
    d_gap = c.delta ** (n - n1) - 1
    a_gap = c.alpha ** (m - m1) - 1
    return {
        "Lambda": c.delta ** n * c.alpha ** (-m) / s5a - 1,
        "Lambda1": d_gap / s5a * c.delta ** n1 * c.alpha ** (-m) - 1,
        "Lambda2": c.delta ** n * c.alpha ** (-m1) / (s5a * a_gap) - 1,
        "Lambda3": d_gap / (s5a * a_gap) * c.delta ** n1 * c.alpha ** (-m1) - 1,
    }


def nonvanishing_spot_check(n: int, n1: int, m: int, m1: int,
                            precision: int = START_PRECISION,
                            max_prec: int = MAX_PRECISION) -> NonvanishingResult:
    """Certify numerically that the four linear forms are nonzero.

    Undecided forms at max_prec are reported, not raised.
    """
    if not (n > n1 >= 0 and m > m1 >= 0):
        raise ValueError("need n > n1 >= 0 and m > m1 >= 0")
    prec = precision
    while True:
        vals = linear_forms(n, n1, m, m1, prec)
        undecided = tuple(k for k, v in vals.items() if not v.excludes_zero())
        if not undecided or prec >= max_prec:
            return NonvanishingResult(vals, undecided)
        prec = min(2 * prec, max_prec)
