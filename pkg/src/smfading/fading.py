"""Fading families, the order-zero Hankel kernel of the envelope density,
envelope sampling and the per-link SNR moment generating function.

Every family is a product of unit-mean generalized-gamma factors scaled by
the mean power ``omega``::

    a^2 = omega * prod_k G_k^(2/beta_k) / b_k,   G_k ~ Gamma(m_k, 1),
    b_k = Gamma(m_k + 2/beta_k) / Gamma(m_k).

EGK has two factors (fading and shadowing), Generalized-K is EGK with both
shaping factors equal to 2, and Nakagami-m is the single gamma factor.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .errors import ConvergenceError, DomainError
from .specfun.foxh import FoxHSpec, contour_integral

__all__ = [
    "EgkLinkParams", "GeneralizedK", "Nakagami", "BranchPair",
    "kernel_spec", "hankel_kernel", "sample_envelope", "sample_envelopes",
    "sample_power", "mgf_link_snr", "power_mgf_tail", "diversity_order",
]


def _log_b(m, beta):
    return float(gammaln(m + 2.0 / beta) - gammaln(m))


class _Family:
    """Shared behaviour of the fading families (a product of gamma factors)."""

    omega: float

    @property
    def factors(self):
        """Tuple of ``(m_k, beta_k)`` pairs, one per generalized-gamma factor."""
        raise NotImplementedError

    def log_b(self):
        return tuple(_log_b(m, beta) for m, beta in self.factors)

    def with_omega(self, omega):
        raise NotImplementedError


def _check(name, value, low, strict=True):
    value = float(value)
    ok = value > low if strict else value >= low
    if not (ok and np.isfinite(value)):
        op = ">" if strict else ">="
        raise DomainError(f"{name} must be {op} {low:g}, got {value!r}")
    return value


@dataclass(frozen=True)
class EgkLinkParams(_Family):
    """Extended Generalized-K link: fading ``(m, beta)``, shadowing ``(m_s, beta_s)``."""

    m: float
    beta: float
    m_s: float
    beta_s: float
    omega: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "m", _check("m", self.m, 0.5))
        object.__setattr__(self, "beta", _check("beta", self.beta, 0.0))
        object.__setattr__(self, "m_s", _check("m_s", self.m_s, 0.5))
        object.__setattr__(self, "beta_s", _check("beta_s", self.beta_s, 0.0))
        object.__setattr__(self, "omega", _check("omega", self.omega, 0.0))
        if not (np.isfinite(self.b) and np.isfinite(self.b_s)):
            raise DomainError("EGK normalizers b, b_s overflow for these parameters")

    @property
    def factors(self):
        return ((self.m, self.beta), (self.m_s, self.beta_s))

    @property
    def b(self):
        return float(np.exp(_log_b(self.m, self.beta)))

    @property
    def b_s(self):
        return float(np.exp(_log_b(self.m_s, self.beta_s)))

    def is_generalized_k(self):
        return self.beta == 2.0 and self.beta_s == 2.0

    def to_generalized_k(self):
        if not self.is_generalized_k():
            raise DomainError("only EGK with beta = beta_s = 2 is Generalized-K")
        return GeneralizedK(self.m, self.m_s, self.omega)

    def with_omega(self, omega):
        return EgkLinkParams(self.m, self.beta, self.m_s, self.beta_s, omega)


@dataclass(frozen=True)
class GeneralizedK(_Family):
    """Gamma-shadowed Nakagami-m power: EGK with ``beta = beta_s = 2``."""

    m: float
    m_s: float
    omega: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "m", _check("m", self.m, 0.5))
        object.__setattr__(self, "m_s", _check("m_s", self.m_s, 0.5))
        object.__setattr__(self, "omega", _check("omega", self.omega, 0.0))

    @property
    def factors(self):
        return ((self.m, 2.0), (self.m_s, 2.0))

    def to_egk(self):
        return EgkLinkParams(self.m, 2.0, self.m_s, 2.0, self.omega)

    def with_omega(self, omega):
        return GeneralizedK(self.m, self.m_s, omega)


@dataclass(frozen=True)
class Nakagami(_Family):
    """Nakagami-m envelope (``m = 1`` is Rayleigh)."""

    m: float
    omega: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "m", _check("m", self.m, 0.5, strict=False))
        object.__setattr__(self, "omega", _check("omega", self.omega, 0.0))

    @property
    def factors(self):
        return ((self.m, 2.0),)

    def to_generalized_k(self, m_s=1e6):
        """Large-``m_s`` Generalized-K surrogate; approximate, for limit checks only."""
        return GeneralizedK(self.m, m_s, self.omega)

    def with_omega(self, omega):
        return Nakagami(self.m, omega)


@dataclass(frozen=True)
class BranchPair:
    """The two links entering one receive branch, ``Z = |z_2 - z_1|^2``."""

    first: _Family
    second: _Family

    def __post_init__(self):
        for link in (self.first, self.second):
            if not isinstance(link, _Family):
                raise DomainError(f"BranchPair expects fading parameters, got {link!r}")

    def swapped(self):
        return BranchPair(self.second, self.first)

    def scaled(self, k):
        """Both mean powers multiplied by ``k``."""
        return BranchPair(self.first.with_omega(self.first.omega * k),
                          self.second.with_omega(self.second.omega * k))

    @classmethod
    def iid(cls, link):
        return cls(link, link)


def diversity_order(link):
    """Exponent ``d`` of the small-power density ``f(x) ~ K x^(d-1)``: ``min m_k beta_k / 2``."""
    return min(m * beta / 2.0 for m, beta in link.factors)


# --------------------------------------------------------------------------
# Hankel kernel  H_0{f_a(r)/r}(R) = E[J0(R a)]
# --------------------------------------------------------------------------

def kernel_spec(link):
    """Fox H parameters of the Hankel kernel; argument ``4 prod b_k / (R^2 omega)``.

    For EGK this is ``H^{2,1}_{2,2}[. | (1,1),(1,1); (m, 2/beta),(m_s, 2/beta_s)]``
    divided by ``Gamma(m) Gamma(m_s)``.
    """
    lower = tuple((m, 2.0 / beta) for m, beta in link.factors)
    return FoxHSpec(len(lower), 1, ((1.0, 1.0), (1.0, 1.0)), lower)


def _kernel_log_arg(link):
    return float(np.log(4.0) + sum(link.log_b()) - np.log(link.omega))


def _kernel_log_norm(link):
    return -float(sum(gammaln(m) for m, _ in link.factors))


def _kernel_at_log_x(link, log_x, rtol):
    """Kernel values at Fox-H argument ``exp(log_x)``; returns (value, error)."""
    log_x = np.asarray(log_x, dtype=float)
    spec = kernel_spec(link)
    norm = _kernel_log_norm(link)
    value = np.empty_like(log_x)
    error = np.empty_like(log_x)
    small = log_x < 0.0
    if np.any(small):
        # large R: standard contour between the left poles and s = 0
        c = 0.5 * spec.pole_bounds()[0]
        if c <= -0.9 and abs(c - round(c)) < 0.1:
            # keep off the zeros of 1 / Gamma(1 + s) at negative integers
            c += 0.25
        res = contour_integral(spec.log_theta, log_x[small], c, rtol=rtol, log_scale=norm)
        value[small], error[small] = res.value, res.error
    if np.any(~small):
        # small R: move the line across the pole of Gamma(-s) at s = 0. Its
        # residue is exactly -1 after normalization and the line crossing
        # flips the sign, so H = 1 + integral on Re s = 1/2.
        res = contour_integral(spec.log_theta, log_x[~small], 0.5, rtol=rtol, log_scale=norm)
        value[~small], error[~small] = 1.0 + res.value, res.error
    return value, error


def hankel_kernel(link, r_freq, *, rtol=1e-10, with_error=False):
    """Order-zero Hankel transform of ``f_a(r) / r`` at ``R = r_freq``.

    Equals ``E[J0(R a)]``; the value at ``R = 0`` is the analytic limit 1.
    Scalar or array input.
    """
    r = np.asarray(r_freq, dtype=float)
    if np.any(r < 0) or not np.all(np.isfinite(r)):
        raise DomainError("hankel_kernel: r_freq must be finite and non-negative")
    flat = np.atleast_1d(r).ravel()
    value = np.ones_like(flat)
    error = np.zeros_like(flat)
    pos = flat > 0
    if np.any(pos):
        log_x = _kernel_log_arg(link) - 2.0 * np.log(flat[pos])
        value[pos], error[pos] = _kernel_at_log_x(link, log_x, rtol)
    value = value.reshape(r.shape) if r.ndim else float(value[0])
    error = error.reshape(r.shape) if r.ndim else float(error[0])
    return (value, error) if with_error else value


@lru_cache(maxsize=256)
def _kernel_on_grid(link, rho0, rho_step, count, rtol):
    """Kernel at ``R = exp(rho0 + k rho_step)``, k = 0..count-1 (cached per link)."""
    rho = rho0 + rho_step * np.arange(count)
    log_x = _kernel_log_arg(link) - 2.0 * rho
    value, error = _kernel_at_log_x(link, log_x, rtol)
    value.flags.writeable = False
    error.flags.writeable = False
    return value, error


def kernel_on_log_grid(link, rho0, rho_step, count, rtol=1e-10):
    """Cached kernel values on the log-spaced grid ``log R = rho0 + k * rho_step``."""
    return _kernel_on_grid(link, float(rho0), float(rho_step), int(count), float(rtol))


# --------------------------------------------------------------------------
# sampling
# --------------------------------------------------------------------------

def sample_power(link, rng, size=None):
    """Draws of the instantaneous power ``a^2`` (mean ``omega``)."""
    shape = () if size is None else size
    out = np.full(shape, float(link.omega))
    for (m, beta), lb in zip(link.factors, link.log_b()):
        g = rng.gamma(m, 1.0, size=shape)
        if beta == 2.0:
            out = out * (g / np.exp(lb))
        else:
            out = out * np.exp((2.0 / beta) * np.log(g) - lb)
    return float(out) if size is None else out


def sample_envelopes(link, rng, size):
    """Array of envelope draws ``a``."""
    return np.sqrt(sample_power(link, rng, size))


def sample_envelope(link, rng):
    """One envelope draw ``a = sqrt(omega * prod_k G_k^(2/beta_k) / b_k)``."""
    return float(np.sqrt(sample_power(link, rng)))


# --------------------------------------------------------------------------
# SNR moment generating function  E[exp(-s * gamma_bar * a^2)]
# --------------------------------------------------------------------------

def _log_factor_density(y, m, beta, log_b):
    """Log-density of ``Y = log(G^(2/beta) / b)`` with ``G ~ Gamma(m, 1)``."""
    w = (y + log_b) * beta / 2.0
    return m * w - np.exp(w) - gammaln(m) + np.log(beta / 2.0)


def _factor_range(m, beta, log_b, y_floor):
    w_hi = np.log(m + 12.0 * np.sqrt(m) + 60.0)
    return y_floor, 2.0 * w_hi / beta - log_b


def _gamma_factor_mgf(t, m):
    # E exp(-t G / m), G ~ Gamma(m, 1)
    return np.exp(-m * np.log1p(t / m))


def _trapezoid_mgf(link, k, step):
    """One trapezoid evaluation of ``E exp(-k a^2 / omega)`` for an array ``k``."""
    factors = list(zip(link.factors, link.log_b()))
    d = diversity_order(link)
    y_floor = -np.log(max(k.max(), 1.0)) - 45.0 / d - 5.0

    inner = None
    for i, ((m, beta), lb) in enumerate(factors):
        if beta == 2.0 and (inner is None or m > factors[inner][0][0]):
            inner = i
    if inner is not None:
        m_in = factors[inner][0][0]
        outer = [f for i, f in enumerate(factors) if i != inner]
        if not outer:
            return _gamma_factor_mgf(k, m_in)
        (m, beta), lb = outer[0]
        lo, hi = _factor_range(m, beta, lb, y_floor)
        y = np.arange(lo, hi + step, step)
        dens = np.exp(_log_factor_density(y, m, beta, lb))
        vals = _gamma_factor_mgf(np.outer(k, np.exp(y)), m_in)
        return step * (vals @ dens)

    # no closed-form factor: density of the summed log-factors on a common grid
    (m1, b1), lb1 = factors[0]
    (m2, b2), lb2 = factors[1]
    lo1, hi1 = _factor_range(m1, b1, lb1, y_floor)
    lo2, hi2 = _factor_range(m2, b2, lb2, y_floor)
    y1 = np.arange(lo1, hi1 + step, step)
    y2 = np.arange(lo2, hi2 + step, step)
    f1 = np.exp(_log_factor_density(y1, m1, b1, lb1))
    f2 = np.exp(_log_factor_density(y2, m2, b2, lb2))
    # direct convolution keeps relative accuracy in the far tails
    dens = step * np.convolve(f1, f2)
    y = y1[0] + y2[0] + step * np.arange(dens.size)
    keep = y <= hi1 + hi2
    y, dens = y[keep], dens[keep]
    return step * (np.exp(-np.outer(k, np.exp(y))) @ dens)


def _factor_width(link):
    from scipy.special import polygamma
    return min((2.0 / beta) * np.sqrt(float(polygamma(1, m))) for m, beta in link.factors)


def mgf_link_snr(link, gamma_bar, s, *, rtol=1e-8, with_error=False):
    """``E[exp(-s * gamma_bar * a^2)]`` for the link's power ``a^2`` (scalar or array ``s``).

    Trapezoidal quadrature in the log-power variable against the density
    of the product construction; a gamma factor with ``beta = 2`` is
    integrated in closed form. The step is halved until two successive
    estimates agree to ``rtol``.
    """
    gamma_bar = float(gamma_bar)
    if not gamma_bar > 0:
        raise DomainError("mgf_link_snr: gamma_bar must be positive")
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0):
        raise DomainError("mgf_link_snr: s must be non-negative")
    k = np.atleast_1d(s_arr).ravel() * gamma_bar * link.omega
    step = min(0.1, _factor_width(link) / 6.0)
    prev = _trapezoid_mgf(link, k, step)
    for _ in range(8):
        step *= 0.5
        cur = _trapezoid_mgf(link, k, step)
        err = np.abs(cur - prev)
        if np.all(err <= rtol * np.abs(cur) + 1e-300):
            break
        prev = cur
    else:
        raise ConvergenceError("mgf_link_snr quadrature did not converge", link=link,
                               step=step, worst=float(np.max(err / np.abs(cur))))
    cur = np.minimum(cur, 1.0)
    value = cur.reshape(s_arr.shape) if s_arr.ndim else float(cur[0])
    if with_error:
        error = err.reshape(s_arr.shape) if s_arr.ndim else float(err[0])
        return value, error
    return value


def power_mgf_tail(link):
    """``(C, d)`` with ``E[exp(-t a^2)] ~ C t^(-d)`` as ``t -> inf``.

    ``d`` is the smallest ``m_k beta_k / 2``; ``C = Gamma(d) K`` where ``K``
    is the residue of the power's Mellin transform at ``u = -d``.
    """
    factors = list(zip(link.factors, link.log_b()))
    orders = [m * beta / 2.0 for (m, beta), _ in factors]
    k_min = int(np.argmin(orders))
    d = orders[k_min]
    for i, o in enumerate(orders):
        if i != k_min and abs(o - d) < 1e-9 * max(1.0, d):
            raise DomainError(
                "coincident leading poles: the power MGF tail carries a log factor")
    (m_star, beta_star), lb_star = factors[k_min]
    log_k = np.log(beta_star / 2.0) - gammaln(m_star) + d * lb_star - d * np.log(link.omega)
    for i, ((m, beta), lb) in enumerate(factors):
        if i == k_min:
            continue
        log_k += gammaln(m - 2.0 * d / beta) - gammaln(m) + d * lb
    return float(np.exp(log_k + gammaln(d))), d
