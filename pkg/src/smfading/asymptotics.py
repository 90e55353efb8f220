"""High-SNR coefficients of the branch difference variable and the
resulting asymptotic pairwise error probability.

For ``Z = |a_2 e^{j phi_2} - a_1 e^{j phi_1}|^2`` with independent uniform
phases, ``E[exp(-s Z)] = c / s + o(1/s)``. The coefficient ``c`` is
available as a quadrature of the product of the two Hankel kernels and,
per family, in closed form through Fox H, Meijer G, Gauss 2F1 or plain
gamma functions.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import ConsistencyError, DivergenceError, DomainError
from .fading import (BranchPair, EgkLinkParams, GeneralizedK, Nakagami,
                     diversity_order, kernel_on_log_grid)
from .specfun.foxh import FoxHSpec, MeijerGSpec, fox_h, meijer_g
from .specfun.hyp2f1 import hyp2f1_with_error

__all__ = [
    "Method", "AsymptoticCoefficient", "GainPair", "PREFACTOR_SCALE",
    "c_numeric", "c_egk", "c_gk", "c_gk_meijer", "c_nakagami", "coefficient",
    "pep_prefactor", "asym_pep", "gains",
]

# Multiplies the prefactor of the asymptotic PEP. Only the self-test touches
# it, to prove that the test harness notices a wrong constant.
PREFACTOR_SCALE = 1.0

_V_LOW = -40.0          # log y where both kernels equal 1 to double precision
_V_CAP = math.log(1e12)
_NUMERIC_RTOL = 1e-9
_TAIL_RTOL = 1e-10


class Method(enum.Enum):
    NUMERIC_ORACLE = "NumericOracle"
    EGK_CLOSED_FORM = "EgkClosedForm"
    GK_CLOSED_FORM = "GkClosedForm"
    NAKAGAMI_CLOSED_FORM = "NakagamiClosedForm"


@dataclass(frozen=True)
class AsymptoticCoefficient:
    """``c`` in ``E[exp(-s Z)] ~ c / s`` (the exponent is always one)."""

    value: float
    method: Method
    achieved_tol: float = 0.0

    def __post_init__(self):
        if not (self.value > 0 and np.isfinite(self.value)):
            raise DomainError(f"asymptotic coefficient must be positive, got {self.value!r}")

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class GainPair:
    """Diversity and coding gain: ``ABEP ~ (coding * snr) ** (-diversity)``."""

    diversity: float
    coding: float

    def abep(self, snr):
        return (self.coding * np.asarray(snr, dtype=float)) ** (-self.diversity)


def _pair(pair):
    if not isinstance(pair, BranchPair):
        raise DomainError(f"expected a BranchPair, got {type(pair).__name__}")
    return pair


def _check_decay(pair):
    d1, d2 = diversity_order(pair.first), diversity_order(pair.second)
    if d1 + d2 <= 1.0:
        raise DivergenceError(
            "kernel product decays no faster than 1/y; the coefficient is infinite",
            small_power_orders=(d1, d2), required="d1 + d2 > 1")
    return d1 + d2 - 1.0


# --------------------------------------------------------------------------
# quadrature oracle
# --------------------------------------------------------------------------

def _integrand(pair, h, count):
    # kernels on R = exp(v / 2), v = _V_LOW + k h
    k1, e1 = kernel_on_log_grid(pair.first, 0.5 * _V_LOW, 0.5 * h, count)
    k2, e2 = kernel_on_log_grid(pair.second, 0.5 * _V_LOW, 0.5 * h, count)
    ev = np.exp(_V_LOW + h * np.arange(count))
    f = 0.25 * ev * k1 * k2
    ferr = 0.25 * ev * (np.abs(k1) * e2 + np.abs(k2) * e1)
    return f, ferr


def _numeric_at_step(pair, h, rate):
    v_hi = 12.0
    while True:
        count = int(round((v_hi - _V_LOW) / h)) + 1
        f, ferr = _integrand(pair, h, count)
        total = h * (f.sum() - 0.5 * f[0] - 0.5 * f[-1]) + 0.25 * math.exp(_V_LOW)
        tail = abs(f[-1]) / rate
        if tail <= _TAIL_RTOL * abs(total):
            # slowest admissible power law; its size doubles as the error bound
            return total + f[-1] / rate, h * ferr.sum() + tail
        if v_hi >= _V_CAP:
            break
        v_hi = min(v_hi + 8.0, _V_CAP)
    # power-law tail beyond the cap, integrated with the local log-slope; a
    # mismatch with the leading rate means sub-leading terms still matter,
    # and is charged to the error estimate
    n_fit = int(round(2.0 / h))
    tail_f = f[-n_fit:]
    slope = -np.polyfit(h * np.arange(n_fit), np.log(np.abs(tail_f)), 1)[0]
    # the kernel asymptote carries 1 / Gamma(1 - d), so the tail may be negative
    if not ((np.all(tail_f > 0) or np.all(tail_f < 0)) and slope > 0):
        raise DivergenceError(
            "coefficient integral has not converged at y = 1e12",
            tail_estimate=tail, accumulated=total, decay_rate=rate, fitted_rate=slope)
    return total + f[-1] / slope, h * ferr.sum() + abs(f[-1] / slope - f[-1] / rate)


def c_numeric(pair, *, rtol=1e-6):
    """Coefficient by quadrature of ``(1/4) int_0^inf K_1(sqrt y) K_2(sqrt y) dy``.

    The integral is taken in ``v = log y`` with the trapezoidal rule (the
    integrand is analytic and decays at both ends), halving the step until
    two passes agree. A power-law tail beyond the last node is added in
    closed form.

    Raises
    ------
    DivergenceError
        If the product of the kernels decays no faster than ``1/y``.
    """
    pair = _pair(pair)
    rate = _check_decay(pair)
    h = 0.2
    prev, _ = _numeric_at_step(pair, h, rate)
    for _ in range(6):
        h *= 0.5
        cur, qerr = _numeric_at_step(pair, h, rate)
        change = abs(cur - prev)
        if change <= min(rtol, _NUMERIC_RTOL) * abs(cur):
            break
        prev = cur
    tol = (change + qerr) / abs(cur)
    if tol > rtol:
        raise DivergenceError("coefficient quadrature missed its tolerance; the kernel "
                              "product decays too slowly for a reliable tail",
                              achieved=tol, requested=rtol, decay_rate=rate)
    return AsymptoticCoefficient(float(cur), Method.NUMERIC_ORACLE, float(tol))


# --------------------------------------------------------------------------
# closed forms
# --------------------------------------------------------------------------

def _as_egk(link):
    if isinstance(link, EgkLinkParams):
        return link
    if isinstance(link, GeneralizedK):
        return link.to_egk()
    raise DomainError(f"{type(link).__name__} link has no EGK closed form")


def egk_fox_spec(pair):
    """Fox H spec, log prefactor and argument of the EGK coefficient."""
    l1, l2 = _as_egk(pair.first), _as_egk(pair.second)
    lb1, lbs1 = l1.log_b()
    lb2, lbs2 = l2.log_b()
    log_pref = (lb1 + lbs1 - math.log(l1.omega)
                - gammaln(l1.m) - gammaln(l2.m) - gammaln(l1.m_s) - gammaln(l2.m_s))
    log_x = math.log(l2.omega) + lb1 + lbs1 - math.log(l1.omega) - lb2 - lbs2
    spec = FoxHSpec(
        2, 2,
        ((1.0 - l2.m, 2.0 / l2.beta), (1.0 - l2.m_s, 2.0 / l2.beta_s)),
        ((l1.m - 2.0 / l1.beta, 2.0 / l1.beta), (l1.m_s - 2.0 / l1.beta_s, 2.0 / l1.beta_s)),
    )
    return spec, float(log_pref), float(log_x)


def c_egk(pair, *, rtol=1e-11):
    """EGK coefficient as a prefactored ``H^{2,2}_{2,2}``.

    Generalized-K links are accepted (they are EGK with unit shaping).

    Raises
    ------
    ContourError
        If no line separates the pole sets (the coefficient diverges).
    """
    pair = _pair(pair)
    spec, log_pref, log_x = egk_fox_spec(pair)
    res = fox_h(spec, math.exp(log_x), rtol=rtol, log_scale=log_pref)
    return AsymptoticCoefficient(res.value, Method.EGK_CLOSED_FORM,
                                 res.error / abs(res.value))


def _gk_links(pair):
    links = []
    for link in (pair.first, pair.second):
        if isinstance(link, GeneralizedK):
            links.append(link)
        elif isinstance(link, EgkLinkParams) and link.is_generalized_k():
            links.append(link.to_generalized_k())
        else:
            raise DomainError("Generalized-K closed form needs beta = beta_s = 2 on both links")
    return links


def c_gk_meijer(pair, *, rtol=1e-11):
    """Generalized-K coefficient through ``G^{2,2}_{2,2}``; returns (value, abs error)."""
    l1, l2 = _gk_links(_pair(pair))
    log_pref = (math.log(l1.m_s * l1.m / l1.omega)
                - gammaln(l1.m) - gammaln(l2.m) - gammaln(l1.m_s) - gammaln(l2.m_s))
    x = (l2.omega * l1.m * l1.m_s) / (l1.omega * l2.m * l2.m_s)
    spec = MeijerGSpec(2, 2, (1.0 - l2.m, 1.0 - l2.m_s), (l1.m - 1.0, l1.m_s - 1.0))
    res = meijer_g(spec, x, rtol=rtol, log_scale=log_pref)
    return res.value, res.error


def _c_gk_hyp(l1, l2):
    m1, ms1, m2, ms2 = l1.m, l1.m_s, l2.m, l2.m_s
    total = m1 + m2 + ms1 + ms2 - 2.0
    log_pref = (gammaln(m2 + ms1 - 1.0) + gammaln(ms2 + ms1 - 1.0)
                + gammaln(m2 + m1 - 1.0) + gammaln(ms2 + m1 - 1.0)
                - gammaln(total)
                - gammaln(m1) - gammaln(ms1) - gammaln(m2) - gammaln(ms2)
                - (m2 - 1.0) * math.log(ms1 * m1 / l1.omega)
                + m2 * math.log(m2 * ms2 / l2.omega))
    z = 1.0 - (l1.omega * m2 * ms2) / (l2.omega * m1 * ms1)
    f, ferr = hyp2f1_with_error(m1 + m2 - 1.0, m2 + ms1 - 1.0, total, z)
    pref = math.exp(log_pref)
    return pref * f, pref * ferr


def c_gk(pair, *, rtol=1e-8):
    """Generalized-K coefficient via Gauss 2F1, cross-checked against Meijer G.

    The 2F1 form is evaluated with the link order chosen so that its
    argument is non-positive. The Meijer G evaluation of the same quantity
    must agree to ``rtol`` (or the two error estimates, if larger).

    Raises
    ------
    ConsistencyError
        If the two evaluations disagree.
    """
    pair = _pair(pair)
    l1, l2 = _gk_links(pair)
    if (l1.omega * l2.m * l2.m_s) / (l2.omega * l1.m * l1.m_s) > 1.0:
        l1, l2 = l2, l1
    value, err = _c_gk_hyp(l1, l2)
    check, check_err = c_gk_meijer(pair)
    gap = abs(value - check)
    # both paths exponentiate sums of log-gammas; their rounding scales with
    # the magnitude of those logs, which is large for large shape parameters
    log_mag = sum(abs(gammaln(v)) for v in (l1.m, l2.m, l1.m_s, l2.m_s,
                                               l1.m_s + l2.m_s, l1.m + l1.m_s + l2.m + l2.m_s))
    conditioning = 16.0 * np.finfo(float).eps * log_mag * abs(value)
    allowed = max(rtol * abs(value), 4.0 * (err + check_err), conditioning)
    if not gap <= allowed:
        raise ConsistencyError(
            f"Generalized-K coefficient: 2F1 path {value!r} and Meijer G path "
            f"{check!r} differ by {gap:.3g} (allowed {allowed:.3g})")
    return AsymptoticCoefficient(value, Method.GK_CLOSED_FORM,
                                 max(gap, err) / abs(value))


def _nakagami_links(pair):
    if not (isinstance(pair.first, Nakagami) and isinstance(pair.second, Nakagami)):
        raise DomainError("Nakagami closed form needs Nakagami-m links")
    return pair.first, pair.second


def c_nakagami(pair):
    """Nakagami-m coefficient, a ratio of gamma functions.

    >>> c_nakagami(BranchPair.iid(Nakagami(1.0))).value
    0.5
    """
    l1, l2 = _nakagami_links(_pair(pair))
    r1, r2 = l1.m / l1.omega, l2.m / l2.omega
    msum = l1.m + l2.m
    log_c = (l1.m * math.log(r1) - gammaln(l1.m) + l2.m * math.log(r2) - gammaln(l2.m)
             + gammaln(msum - 1.0) + (1.0 - msum) * math.log(r1 + r2))
    return AsymptoticCoefficient(math.exp(log_c), Method.NAKAGAMI_CLOSED_FORM,
                                 8 * np.finfo(float).eps)


def coefficient(pair, method=None):
    """Coefficient by the most specific closed form available for the pair.

    Mixed Nakagami/EGK pairs have no closed form here and use the quadrature.
    """
    pair = _pair(pair)
    if method is not None:
        return {
            Method.NUMERIC_ORACLE: c_numeric,
            Method.EGK_CLOSED_FORM: c_egk,
            Method.GK_CLOSED_FORM: c_gk,
            Method.NAKAGAMI_CLOSED_FORM: c_nakagami,
        }[Method(method)](pair)
    kinds = {type(pair.first), type(pair.second)}
    if kinds == {Nakagami}:
        return c_nakagami(pair)
    if Nakagami in kinds:
        return c_numeric(pair)
    try:
        _gk_links(pair)
    except DomainError:
        return c_egk(pair)
    return c_gk(pair)


# --------------------------------------------------------------------------
# asymptotic PEP and gains
# --------------------------------------------------------------------------

def pep_prefactor(n_branches):
    """``2^(L-1) Gamma(L + 1/2) / (sqrt(pi) Gamma(L + 1))`` times :data:`PREFACTOR_SCALE`."""
    n = int(n_branches)
    if n < 1 or n != n_branches:
        raise DomainError(f"number of branches must be a positive integer, got {n_branches!r}")
    log_p = (n - 1) * math.log(2.0) + gammaln(n + 0.5) - 0.5 * math.log(math.pi) - gammaln(n + 1.0)
    return PREFACTOR_SCALE * math.exp(log_p)


def _values(coeffs):
    vals = [float(c) for c in coeffs]
    if not vals:
        raise DomainError("need at least one coefficient")
    if any(not v > 0 for v in vals):
        raise DomainError("coefficients must be positive")
    return vals


def asym_pep(coeffs, a_scale):
    """High-SNR PEP ``prefactor(L) * prod(c) * A^(-L)`` for ``L = len(coeffs)``.

    >>> asym_pep([0.5], 100.0)
    0.0025
    """
    vals = _values(coeffs)
    a = np.asarray(a_scale, dtype=float)
    if np.any(a <= 0):
        raise DomainError("a_scale must be positive")
    n = len(vals)
    out = pep_prefactor(n) * math.prod(vals) * a ** (-n)
    return float(out) if out.ndim == 0 else out


def gains(coeffs, prefactor, n_branches=None):
    """Diversity and coding gain of ``prefactor * asym_pep(coeffs, snr)``."""
    vals = _values(coeffs)
    n = len(vals) if n_branches is None else int(n_branches)
    if n != len(vals):
        raise DomainError(f"{len(vals)} coefficients given for {n} branches")
    if not prefactor > 0:
        raise DomainError("prefactor must be positive")
    coding = (prefactor * pep_prefactor(n) * math.prod(vals)) ** (-1.0 / n)
    return GainPair(float(n), float(coding))
