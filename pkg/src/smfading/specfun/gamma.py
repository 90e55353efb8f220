"""Principal-branch complex log-gamma.

Lanczos approximation (g = 7, nine terms) on Re z >= 0.5 and the reflection
formula elsewhere. Discs of radius 0.2 around the zeros at 1 and 2 use the
Taylor series of log Gamma(1 + e) so relative accuracy holds there too. The
branch is real on the positive real axis and continuous on C minus (-inf, 0].
"""

import numpy as np
from scipy.special import zeta

from ..errors import DomainError

__all__ = ["log_gamma_complex", "log_gamma_real", "gamma_ratio"]

_G = 7.0
_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)
_LOG_PI = np.log(np.pi)
_TWO_PI = 2.0 * np.pi
_TAYLOR_RADIUS = 0.2
# log Gamma(1 + e) = -euler*e + sum_{k>=2} (-1)^k zeta(k) e^k / k
_TAYLOR = np.array(
    [0.0, -np.euler_gamma] + [(-1) ** k * zeta(k) / k for k in range(2, 32)]
)


def _taylor_near_one(e):
    acc = np.zeros_like(e)
    for c in _TAYLOR[:0:-1]:
        acc = (acc + c) * e
    return acc


def _lanczos(z):
    # log Gamma(z) for Re z >= 0.5
    w = z - 1.0
    acc = np.full_like(w, _COEF[0])
    for k in range(1, len(_COEF)):
        acc = acc + _COEF[k] / (w + k)
    t = w + _G + 0.5
    return _HALF_LOG_2PI + (w + 0.5) * np.log(t) - t + np.log(acc)


def _log_sinpi(z):
    """Principal log of sin(pi z), stable for large |Im z|."""
    x = z.real
    y = z.imag
    # exact reduction of the real part keeps sin(pi x) accurate for large x
    xr = x - 2.0 * np.round(0.5 * x)
    zr = xr + 1j * np.abs(y)
    out = np.empty_like(zr)
    small = np.abs(y) < 15.0
    if np.any(small):
        out[small] = np.log(np.sin(np.pi * zr[small]))
    big = ~small
    if np.any(big):
        zb = zr[big]
        # sin(pi z) = (i/2) exp(-i pi z) (1 - exp(2 i pi z)) for Im z > 0
        val = -1j * np.pi * zb + np.log1p(-np.exp(2j * np.pi * zb)) + (np.log(0.5) + 0.5j * np.pi)
        im = np.mod(val.imag + np.pi, _TWO_PI) - np.pi
        out[big] = val.real + 1j * im
    neg = y < 0
    out[neg] = np.conj(out[neg])
    return out


def log_gamma_complex(z):
    """Principal-branch ``log Gamma(z)`` for scalar or array complex input.

    Raises
    ------
    DomainError
        If any element is a non-positive integer (a pole of Gamma).
    """
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    pole = (z.imag == 0) & (z.real <= 0) & (z.real == np.floor(z.real))
    if np.any(pole):
        bad = z[pole][0]
        raise DomainError(f"log_gamma_complex: pole of Gamma at z = {bad.real:g}")

    out = np.empty_like(z)
    near1 = np.abs(z - 1.0) < _TAYLOR_RADIUS
    near2 = np.abs(z - 2.0) < _TAYLOR_RADIUS
    if np.any(near1):
        out[near1] = _taylor_near_one(z[near1] - 1.0)
    if np.any(near2):
        e = z[near2] - 2.0
        out[near2] = _taylor_near_one(e) + np.log1p(e)
    right = (z.real >= 0.5) & ~near1 & ~near2
    if np.any(right):
        out[right] = _lanczos(z[right])
    left = z.real < 0.5
    if np.any(left):
        zl = z[left]
        shift = np.copysign(_TWO_PI, zl.imag) * np.floor(0.5 * zl.real + 0.25)
        out[left] = (_LOG_PI + 1j * shift) - _log_sinpi(zl) - _lanczos(1.0 - zl)
    return out[0] if scalar else out


def log_gamma_real(x):
    """``log|Gamma(x)|`` and ``sign(Gamma(x))`` for real ``x`` (scalar or array)."""
    lg = log_gamma_complex(np.asarray(x, dtype=float) + 0j)
    sign = np.where(np.cos(np.asarray(lg).imag) < 0, -1.0, 1.0)
    return np.real(lg), sign


def gamma_ratio(num, den):
    """``prod Gamma(num) / prod Gamma(den)`` for real arguments, evaluated in log space."""
    lg_n, s_n = log_gamma_real(np.asarray(num, dtype=float))
    lg_d, s_d = log_gamma_real(np.asarray(den, dtype=float))
    sign = np.prod(s_n) * np.prod(s_d)
    return float(sign * np.exp(np.sum(lg_n) - np.sum(lg_d)))
