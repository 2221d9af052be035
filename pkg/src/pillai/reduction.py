"""Baker-Davenport reduction and the four campaigns that shrink the bound on n.

Every campaign works with a linear form

    Gamma = n' log(delta) - m' log(alpha) + L,

where L is the log of the constant factor of the family (see `log_constant`).
For Gamma > 0 we divide by log(alpha) (tau = log delta / log alpha,
mu = L / log alpha); for Gamma < 0 we divide -Gamma by log(delta)
(tau = log alpha / log delta, mu = -L / log delta).  Since ||x|| = ||-x||,
the sign in front of mu does not affect epsilon.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from . import contfrac
from .contfrac import Convergent, PartialQuotients
from .realnum import (
    MAX_PRECISION,
    CertReal,
    PrecisionExhausted,
    UndecidedError,
    compute_constants,
    dist_to_nearest_int,
)

log = logging.getLogger(__name__)

Refinable = Callable[[int], CertReal]

DEFAULT_PRECISION = 512
EXPANSION_TERMS = 130
PRINTED_M = 283 * 10 ** 45
PRINTED_INDEX = 98

PRINTED_CONVERGENTS = {
    "delta-over-alpha": (78093067704223831799032754534503501859635391435517,
                         45634243076387457097046528084208490147594968308975),
    "alpha-over-delta": (1000540334879242934726141761162813294034885977722,
                         1712206861451396832387596141129961335575127483549),
}

SIGN_TAU = {"pos": "delta-over-alpha", "neg": "alpha-over-delta"}

# (family, sign, root) -> (printed k-bound, printed epsilon lower bound)
PRINTED_TARGETS: dict[tuple[str, str, str], tuple[int | None, Fraction | None]] = {
    ("gamma", "pos", "delta"): (250, Fraction("0.35")),
    ("gamma", "pos", "alpha"): (420, Fraction("0.35")),
    ("gamma", "neg", "delta"): (242, Fraction("0.47")),
    ("gamma", "neg", "alpha"): (406, Fraction("0.47")),
    ("gamma1", "pos", "alpha"): (446, Fraction("0.0004")),
    ("gamma1", "neg", "alpha"): (429, None),
    ("gamma2", "pos", "delta"): (263, Fraction("0.00077")),
    ("gamma2", "neg", "delta"): (None, None),
    ("gamma3", "pos", "delta"): (274, Fraction("2e-5")),
    ("gamma3", "neg", "delta"): (None, None),
}

# a certificate with epsilon below this is retried one convergent deeper
SMALL_EPSILON = Fraction(1, 1000)

PRINTED_RANGES = {"gamma1": 250, "gamma2": 420, "gamma3": (264, 446)}


class ReductionFailure(Exception):
    pass


class DenominatorTooSmall(ReductionFailure):
    pass


class EpsilonNonPositive(ReductionFailure):
    def __init__(self, msg: str, epsilon: CertReal):
        super().__init__(msg)
        self.epsilon = epsilon


# -- constants -------------------------------------------------------------

@lru_cache(maxsize=None)
def tau_delta_over_alpha(prec: int) -> CertReal:
    c = compute_constants(prec)
    return c.log_delta / c.log_alpha


@lru_cache(maxsize=None)
def tau_alpha_over_delta(prec: int) -> CertReal:
    c = compute_constants(prec)
    return c.log_alpha / c.log_delta


TAU_SOURCES: dict[str, Refinable] = {
    "delta-over-alpha": tau_delta_over_alpha,
    "alpha-over-delta": tau_alpha_over_delta,
}


def log_root(name: str, prec: int) -> CertReal:
    c = compute_constants(prec)
    return c.log_delta if name == "delta" else c.log_alpha


@lru_cache(maxsize=None)
def _log_sqrt5_a(prec: int) -> CertReal:
    return compute_constants(prec).sqrt5_a.log()


@lru_cache(maxsize=4096)
def _log_delta_gap(k: int, prec: int) -> CertReal:
    return (compute_constants(prec).delta ** k - 1).log()


@lru_cache(maxsize=4096)
def _log_alpha_gap(l: int, prec: int) -> CertReal:
    return (compute_constants(prec).alpha ** l - 1).log()


def log_constant(family: str, param: tuple[int, ...], prec: int) -> CertReal:
    """L for each family:

    gamma   -log(sqrt5 a)
    gamma1  log((delta^k - 1) / (sqrt5 a))
    gamma2  -log(sqrt5 a (alpha^k - 1))
    gamma3  log((delta^k - 1) / (sqrt5 a (alpha^l - 1)))
    """
    base = -_log_sqrt5_a(prec)
    if family == "gamma":
        return base
    if family == "gamma1":
        return _log_delta_gap(param[0], prec) + base
    if family == "gamma2":
        return base - _log_alpha_gap(param[0], prec)
    if family == "gamma3":
        k, l = param
        return _log_delta_gap(k, prec) + base - _log_alpha_gap(l, prec)
    raise ValueError(f"unknown family {family!r}")


def mu_source(family: str, param: tuple[int, ...], sign: str) -> Refinable:
    def mu(prec: int) -> CertReal:
        L = log_constant(family, param, prec)
        c = compute_constants(prec)
        return L / c.log_alpha if sign == "pos" else -L / c.log_delta
    return mu


# -- envelope constants ------------------------------------------------------

@dataclass(frozen=True)
class Envelope:
    """|Gamma| < factor * root^shift * B^-k, so A = factor root^shift / log(divisor)."""

    family: str
    root: str            # B of the lemma: "delta" or "alpha"
    factor: Fraction
    shift_root: str
    shift: int
    printed: dict[str, Fraction]   # sign -> printed A

    def recomputed(self, sign: str, prec: int = 192) -> CertReal:
        c = compute_constants(prec)
        base = c.delta if self.shift_root == "delta" else c.alpha
        divisor = c.log_alpha if sign == "pos" else c.log_delta
        return CertReal.exact(self.factor, prec) * base ** self.shift / divisor

    def A(self, sign: str) -> Fraction:
        rec = round_up_decimal(self.recomputed(sign))
        printed = self.printed.get(sign)
        return rec if printed is None else max(rec, printed)


# 2x comes from |x| < 2|e^x - 1| on (-1/2, 1/2)
ENVELOPES: dict[tuple[str, str], Envelope] = {
    ("gamma", "delta"): Envelope("gamma", "delta", Fraction(2), "delta", 6,
                                 {"pos": Fraction(170), "neg": Fraction(98)}),
    ("gamma", "alpha"): Envelope("gamma", "alpha", Fraction(2), "alpha", 3,
                                 {"pos": Fraction(20), "neg": Fraction(12)}),
    ("gamma1", "alpha"): Envelope("gamma1", "alpha", Fraction("7.3"), "alpha", 0,
                                  {"pos": Fraction(26)}),
    ("gamma2", "delta"): Envelope("gamma2", "delta", Fraction(34), "delta", 4,
                                  {"pos": Fraction(830)}),
    ("gamma3", "delta"): Envelope("gamma3", "delta", Fraction("27.6"), "delta", 4,
                                  {"pos": Fraction(390)}),
}


def round_up_decimal(x: CertReal, digits: int = 3) -> Fraction:
    """Smallest decimal with `digits` significant digits that is >= x.hi."""
    hi = x.fraction_bounds()[1]
    if hi <= 0:
        raise ValueError("expected a positive quantity")
    scale = Fraction(10) ** (math.floor(math.log10(hi)) - digits + 1)
    while hi / scale >= 10 ** digits:
        scale *= 10
    while hi / scale < 10 ** (digits - 1):
        scale /= 10
    return -((-hi) // scale) * scale


# -- the lemma ---------------------------------------------------------------

@dataclass(frozen=True)
class ReductionProblem:
    """0 < m tau - n + mu < A B^-k with m <= M."""

    tau: Refinable
    mu: Refinable
    A: Fraction
    B: str
    M: int
    label: str = ""

    def __post_init__(self) -> None:
        if self.A <= 0:
            raise ValueError("A must be positive")
        if self.M < 1:
            raise ValueError("M must be at least 1")
        if self.B not in ("delta", "alpha"):
            raise ValueError("B must be 'delta' or 'alpha'")


@dataclass(frozen=True)
class ReductionCertificate:
    q: int
    convergent_index: int
    epsilon: CertReal
    k_bound: int
    precision: int
    label: str = ""


def baker_davenport(prob: ReductionProblem, conv: Convergent,
                    precision: int = DEFAULT_PRECISION,
                    max_prec: int = MAX_PRECISION) -> ReductionCertificate:
    """Apply the Baker-Davenport lemma with convergent p/q of tau.

    On success no solution of the inequality has m <= M and
    k >= k_bound = ceil(log(A q / eps) / log B).
    """
    q = conv.q
    if q <= 6 * prob.M:
        raise DenominatorTooSmall(f"q = {q} does not exceed 6M = {6 * prob.M}")
    prec = precision
    while True:
        tq = dist_to_nearest_int(prob.tau(prec) * q)
        mq = dist_to_nearest_int(prob.mu(prec) * q)
        eps = mq - tq * prob.M
        if eps.lo > 0:
            ratio = (CertReal.exact(prob.A * q, prec) / eps).log() / log_root(prob.B, prec)
            k_bound = max(1, math.ceil(ratio.fraction_bounds()[1]))
            return ReductionCertificate(q, conv.index, eps, k_bound, prec, prob.label)
        if eps.hi <= 0:
            raise EpsilonNonPositive(f"epsilon <= 0 for {prob.label or 'problem'} "
                                     f"at convergent {conv.index}", eps)
        if prec >= max_prec:
            raise PrecisionExhausted(f"sign of epsilon undecided at {prec} bits")
        prec = min(2 * prec, max_prec)


def brute_force_check(prob: ReductionProblem, cert: ReductionCertificate,
                      m_max: int = 10 ** 4, precision: int = DEFAULT_PRECISION) -> bool:
    """Scan 1 <= m <= min(M, m_max): no n gives 0 < m tau - n + mu < A B^-k_bound.

    The smallest positive value of m tau - n + mu over n is frac(m tau + mu).
    Values are screened in float64 and any candidate below 1e-9 is redone
    with interval arithmetic.
    """
    m_top = min(prob.M, m_max)
    tau = prob.tau(precision)
    mu = prob.mu(precision)
    frac_tau = _frac_multiples(tau, m_top)
    mu_frac = float(mu.fraction_bounds()[0] % 1)
    vals = np.mod(frac_tau + mu_frac, 1.0)
    c = compute_constants(precision)
    root = c.delta if prob.B == "delta" else c.alpha
    threshold = CertReal.exact(prob.A, precision) / root ** cert.k_bound
    # values just below 1 may be rounding of a tiny positive fraction
    suspects = np.nonzero((vals < 1e-9) | (vals > 1 - 1e-9))[0] + 1
    for m in suspects:
        x = tau * int(m) + mu
        try:
            f = x - x.floor()
        except UndecidedError:
            return False
        if f.lo < threshold.hi:
            return False
    return True


@lru_cache(maxsize=8)
def _frac_multiples_cached(key: tuple, m_top: int) -> np.ndarray:
    lo_num, lo_den = key
    t = Fraction(lo_num, lo_den)
    return np.array([float((m * t) % 1) for m in range(1, m_top + 1)])


def _frac_multiples(tau: CertReal, m_top: int) -> np.ndarray:
    t = tau.fraction_bounds()[0]
    return _frac_multiples_cached((t.numerator, t.denominator), m_top)


# -- campaigns ---------------------------------------------------------------

@dataclass(frozen=True)
class ReductionSetup:
    """Expansions of both tau values, their convergents and the starting
    convergent of each (the printed 50-digit pair, located by value)."""

    M: int
    expansions: dict[str, PartialQuotients]
    convergents: dict[str, list[Convergent]]
    start: dict[str, int]
    printed_index: dict[str, int | None]
    precision: int = DEFAULT_PRECISION
    max_prec: int = MAX_PRECISION

    def tau(self, sign: str) -> Refinable:
        return TAU_SOURCES[SIGN_TAU[sign]]


def prepare(M: int | None = None, terms: int = EXPANSION_TERMS,
            precision: int = DEFAULT_PRECISION, max_prec: int = MAX_PRECISION) -> ReductionSetup:
    if M is None:
        from .linforms import bound_chain
        M = bound_chain(min(precision, 192) if precision >= 64 else 64,
                        max(max_prec, 192)).n_absolute
    expansions, convs, start, printed_index = {}, {}, {}, {}
    for name, source in TAU_SOURCES.items():
        pq = contfrac.expand(source, terms, min(precision, max_prec), max_prec, label=name)
        cs = contfrac.convergents(pq)
        expansions[name], convs[name] = pq, cs
        idx = contfrac.locate(cs, *PRINTED_CONVERGENTS[name])
        printed_index[name] = idx
        if idx is not None and cs[idx].q > 6 * M:
            start[name] = idx
        else:
            start[name] = contfrac.first_convergent_exceeding(cs, 6 * M).index
        if idx is not None and idx != PRINTED_INDEX:
            log.warning("printed convergent of %s sits at index %d, not %d",
                        name, idx, PRINTED_INDEX)
    return ReductionSetup(M, expansions, convs, start, printed_index, precision, max_prec)


@dataclass(frozen=True)
class Fallback:
    param: tuple[int, ...]
    from_index: int
    to_index: int
    reason: str   # "epsilon<=0" or "small epsilon"


@dataclass
class CampaignReport:
    family: str
    sign: str
    root: str
    A: Fraction
    A_printed: Fraction | None
    A_recomputed: CertReal
    certificates: dict[tuple[int, ...], ReductionCertificate] = field(default_factory=dict)
    fallbacks: list[Fallback] = field(default_factory=list)
    unresolved: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def label(self) -> str:
        return f"{self.family}{'+' if self.sign == 'pos' else '-'}/{self.root}"

    @property
    def max_k_bound(self) -> int:
        return max(c.k_bound for c in self.certificates.values())

    @property
    def worst_param(self) -> tuple[int, ...]:
        return max(self.certificates, key=lambda p: self.certificates[p].k_bound)

    @property
    def min_epsilon(self) -> CertReal:
        return min((c.epsilon for c in self.certificates.values()), key=lambda e: e.lo)

    @property
    def max_precision(self) -> int:
        return max(c.precision for c in self.certificates.values())

    @property
    def ok(self) -> bool:
        return bool(self.certificates) and not self.unresolved

    @property
    def printed_bound(self) -> int | None:
        return PRINTED_TARGETS.get((self.family, self.sign, self.root), (None, None))[0]

    @property
    def printed_epsilon(self) -> Fraction | None:
        return PRINTED_TARGETS.get((self.family, self.sign, self.root), (None, None))[1]


def problem_for(setup: ReductionSetup, family: str, sign: str, root: str,
                param: tuple[int, ...] = ()) -> ReductionProblem:
    env = ENVELOPES[(family, root)]
    return ReductionProblem(setup.tau(sign), mu_source(family, param, sign), env.A(sign),
                            root, setup.M, label=f"{family}{param}")


def run_campaign(setup: ReductionSetup, family: str, sign: str, root: str,
                 params: Iterable[tuple[int, ...]], start: int | None = None) -> CampaignReport:
    """baker_davenport over every parameter.

    epsilon <= 0 moves that parameter on to the next convergent.  A tiny
    epsilon inflates k_bound by log(1/eps), so below SMALL_EPSILON the next
    convergent is tried as well and the smaller bound kept.  Both
    certificates are valid, so this only sharpens the result.
    """
    env = ENVELOPES[(family, root)]
    convs = setup.convergents[SIGN_TAU[sign]]
    first = setup.start[SIGN_TAU[sign]] if start is None else start
    report = CampaignReport(family, sign, root, env.A(sign), env.printed.get(sign),
                            env.recomputed(sign))
    for param in params:
        prob = problem_for(setup, family, sign, root, param)
        cert, idx = _certify(prob, convs, first, setup)
        if cert is None:
            report.unresolved.append(param)
            continue
        reason = "epsilon<=0" if idx != first else ""
        if cert.epsilon.hi < SMALL_EPSILON:
            better, j = _certify(prob, convs, idx + 1, setup)
            if better is not None and better.k_bound < cert.k_bound:
                cert, idx, reason = better, j, "small epsilon"
        report.certificates[param] = cert
        if idx != first:
            report.fallbacks.append(Fallback(param, first, idx, reason))
    return report


def _certify(prob: ReductionProblem, convs: Sequence[Convergent], idx: int,
             setup: ReductionSetup) -> tuple[ReductionCertificate | None, int]:
    """First certificate from convergent idx onwards; None if none succeeds."""
    while idx < len(convs):
        try:
            return baker_davenport(prob, convs[idx], setup.precision, setup.max_prec), idx
        except EpsilonNonPositive:
            idx += 1
        except (PrecisionExhausted, UndecidedError, DenominatorTooSmall):
            break
    return None, idx


def campaign_gamma(setup: ReductionSetup, sign: str) -> dict[str, CampaignReport]:
    """The first reduction: bounds on n - n1 (root delta) and m - m1 (root alpha)."""
    return {root: run_campaign(setup, "gamma", sign, root, [()])
            for root in ("delta", "alpha")}


def campaign_gamma1(setup: ReductionSetup, k_range: Sequence[int] = range(1, 251),
                    sign: str = "pos") -> CampaignReport:
    return run_campaign(setup, "gamma1", sign, "alpha", [(k,) for k in k_range])


def campaign_gamma2(setup: ReductionSetup, k_range: Sequence[int] = range(1, 421),
                    sign: str = "pos") -> CampaignReport:
    return run_campaign(setup, "gamma2", sign, "delta", [(k,) for k in k_range])


def campaign_gamma3(setup: ReductionSetup, k_range: Sequence[int] = range(1, 265),
                    l_range: Sequence[int] = range(1, 447), sign: str = "pos",
                    deeper: int | None = None) -> CampaignReport:
    """Final reduction over the (k, l) grid, started one convergent deeper
    than the other campaigns."""
    if deeper is None:
        deeper = setup.start[SIGN_TAU[sign]] + 1
    params = [(k, l) for k in k_range for l in l_range]
    return run_campaign(setup, "gamma3", sign, "delta", params, start=deeper)


@dataclass
class ReductionSummary:
    setup: ReductionSetup
    reports: list[CampaignReport]
    n_gap_bound: int        # n - n1 < n_gap_bound
    m_gap_bound: int        # m - m1 < m_gap_bound
    final_n_bound: int      # n < final_n_bound

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.reports)


def run_reduction(setup: ReductionSetup,
                  progress: Callable[[CampaignReport], None] | None = None) -> ReductionSummary:
    """All campaigns, chained through the case analysis.

    Gamma gives n - n1 < X1 or m - m1 < Y1.  Gamma1 over n - n1 < X1 gives
    m - m1 < Y2; Gamma2 over m - m1 < Y1 gives n - n1 < X2.  Hence always
    n - n1 < max(X1, X2) and m - m1 < max(Y1, Y2), and Gamma3 over that grid
    bounds n.  Gaps below 20 (excluded by the envelopes' assumptions) lie
    inside every range because all ranges start at 1.
    """
    reports: list[CampaignReport] = []

    def add(r: CampaignReport) -> CampaignReport:
        reports.append(r)
        if progress:
            progress(r)
        return r

    x1 = y1 = 0
    for sign in ("pos", "neg"):
        g = campaign_gamma(setup, sign)
        for r in g.values():
            add(r)
        if not all(r.ok for r in g.values()):
            return ReductionSummary(setup, reports, 0, 0, 0)
        x1 = max(x1, g["delta"].max_k_bound)
        y1 = max(y1, g["alpha"].max_k_bound)

    k1 = max(PRINTED_RANGES["gamma1"], x1 - 1)
    k2 = max(PRINTED_RANGES["gamma2"], y1 - 1)
    y2 = x2 = 0
    for sign in ("pos", "neg"):
        r1 = add(campaign_gamma1(setup, range(1, k1 + 1), sign))
        r2 = add(campaign_gamma2(setup, range(1, k2 + 1), sign))
        if not (r1.ok and r2.ok):
            return ReductionSummary(setup, reports, 0, 0, 0)
        y2 = max(y2, r1.max_k_bound)
        x2 = max(x2, r2.max_k_bound)
    n_gap, m_gap = max(x1, x2), max(y1, y2)

    k3 = max(PRINTED_RANGES["gamma3"][0], n_gap - 1)
    l3 = max(PRINTED_RANGES["gamma3"][1], m_gap - 1)
    final = 0
    for sign in ("pos", "neg"):
        r3 = add(campaign_gamma3(setup, range(1, k3 + 1), range(1, l3 + 1), sign))
        if not r3.ok:
            return ReductionSummary(setup, reports, n_gap, m_gap, 0)
        final = max(final, r3.max_k_bound)
    return ReductionSummary(setup, reports, n_gap, m_gap, final)
