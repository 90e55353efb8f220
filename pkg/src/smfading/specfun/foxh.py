"""Fox H and Meijer G functions of a positive real argument.

Both are evaluated from their Mellin-Barnes integrals

    H(x) = (1 / 2 pi i) int_{c - i inf}^{c + i inf} Theta(s) x^(-s) ds,

    Theta(s) = prod_{j<=m} Gamma(b_j + B_j s) prod_{j<=n} Gamma(1 - a_j - A_j s)
               / prod_{j>m} Gamma(1 - b_j - B_j s) prod_{j>n} Gamma(a_j + A_j s),

on a vertical line that separates the poles of the two numerator products.
For real parameters Theta(conj s) = conj Theta(s), so only the upper half of
the line is integrated, with the trapezoidal rule. The integrand is analytic
in a strip around the line, so the rule converges geometrically in the step;
the step is halved and the truncation height doubled until both the
step-refinement change and the truncated tail are below tolerance.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .._backend import mb_real_sum
from ..errors import ContourError, ConvergenceError, DomainError
from .gamma import log_gamma_complex

__all__ = ["FoxHSpec", "MeijerGSpec", "FoxHResult", "fox_h", "meijer_g", "contour_integral"]

_DEFAULT_STEP = 0.05
_MIN_STEP = 1e-4
_INITIAL_HEIGHT = 8.0
_MAX_HEIGHT = 4096.0
_TAIL_RATIO = 1e-17


class FoxHResult(NamedTuple):
    """Value of a contour quadrature with its achieved absolute error estimate."""

    value: object
    error: object
    step: float
    height: float
    abscissa: float


@dataclass(frozen=True)
class FoxHSpec:
    """Orders and parameters of ``H^{m,n}_{p,q}[x | (a_j, A_j); (b_j, B_j)]``."""

    m: int
    n: int
    upper: tuple = ()
    lower: tuple = ()

    def __post_init__(self):
        upper = tuple((float(a), float(al)) for a, al in self.upper)
        lower = tuple((float(b), float(be)) for b, be in self.lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "lower", lower)
        if not 0 <= self.m <= len(lower):
            raise DomainError(f"FoxHSpec: need 0 <= m <= q, got m={self.m}, q={len(lower)}")
        if not 0 <= self.n <= len(upper):
            raise DomainError(f"FoxHSpec: need 0 <= n <= p, got n={self.n}, p={len(upper)}")
        if any(al <= 0 for _, al in upper) or any(be <= 0 for _, be in lower):
            raise DomainError("FoxHSpec: all scale parameters must be strictly positive")

    @property
    def p(self):
        return len(self.upper)

    @property
    def q(self):
        return len(self.lower)

    def pole_bounds(self):
        """(rightmost left pole, leftmost right pole); +-inf when a set is empty."""
        left = max((-b / be for b, be in self.lower[: self.m]), default=-np.inf)
        right = min(((1.0 - a) / al for a, al in self.upper[: self.n]), default=np.inf)
        return left, right

    def decay_rate(self):
        """The quantity a* governing exponential decay of Theta along the line."""
        up, lo = self.upper, self.lower
        return (sum(al for _, al in up[: self.n]) - sum(al for _, al in up[self.n:])
                + sum(be for _, be in lo[: self.m]) - sum(be for _, be in lo[self.m:]))

    def default_abscissa(self):
        """Midpoint of the pole-separating interval.

        Raises
        ------
        ContourError
            If no vertical line separates the two pole sets.
        """
        left, right = self.pole_bounds()
        if not left < right:
            raise ContourError(
                f"no separating contour: rightmost left pole {left:.6g} >= "
                f"leftmost right pole {right:.6g}")
        if np.isinf(left) and np.isinf(right):
            return 0.0
        if np.isinf(left):
            return right - 0.5
        if np.isinf(right):
            return left + 0.5
        return 0.5 * (left + right)

    def log_theta(self, s):
        """``log Theta(s)`` on the principal branch of each gamma factor."""
        s = np.asarray(s, dtype=complex)
        out = np.zeros_like(s)
        for j, (b, be) in enumerate(self.lower):
            if j < self.m:
                out += log_gamma_complex(b + be * s)
            else:
                out -= log_gamma_complex(1.0 - b - be * s)
        for j, (a, al) in enumerate(self.upper):
            if j < self.n:
                out += log_gamma_complex(1.0 - a - al * s)
            else:
                out -= log_gamma_complex(a + al * s)
        return out


@dataclass(frozen=True)
class MeijerGSpec:
    """Orders and parameters of ``G^{m,n}_{p,q}[x | a_1..a_p; b_1..b_q]``."""

    m: int
    n: int
    upper: tuple = ()
    lower: tuple = ()

    def to_fox(self):
        """The equivalent Fox H spec (all scale parameters equal to one)."""
        return FoxHSpec(self.m, self.n, tuple((a, 1.0) for a in self.upper),
                        tuple((b, 1.0) for b in self.lower))


def _tail_height(log_theta, c, step, rel):
    """Smallest doubling of the initial height past which |Theta| is negligible."""
    height = _INITIAL_HEIGHT
    while True:
        t = np.arange(0.0, height + 0.5 * step, step)
        lt = log_theta(c + 1j * t).real
        peak = lt.max()
        tail = lt[t >= 0.5 * height]
        if tail.max() - peak < np.log(rel) and lt[-1] < lt[len(lt) // 2]:
            return height
        height *= 2.0
        if height > _MAX_HEIGHT:
            raise ConvergenceError(
                "Mellin-Barnes integrand does not decay along the contour",
                abscissa=c, height=height)


def contour_integral(log_theta, log_x, c, *, rtol=1e-10, log_scale=0.0,
                     step=None, height=None, refine=True, decay=None):
    """Trapezoidal Mellin-Barnes quadrature on the line ``Re s = c``.

    Parameters
    ----------
    log_theta : callable
        Complex ``log Theta(s)``; must satisfy ``Theta(conj s) = conj Theta(s)``.
    log_x : array_like
        Natural logarithms of the (positive) arguments.
    c : float
        Abscissa of the contour. The caller is responsible for pole bookkeeping.
    log_scale : float
        Added to ``log Theta`` before exponentiation; keeps large gamma
        prefactors from overflowing.
    step, height : float, optional
        Fix the trapezoid step / truncation height instead of choosing them.
    refine : bool
        Halve the step until successive estimates agree.

    Returns
    -------
    FoxHResult
    """
    log_x = np.atleast_1d(np.asarray(log_x, dtype=float))
    if step is None:
        # the aliasing error grows like exp(d |log x|) for a strip of half-width d
        step = min(_DEFAULT_STEP, 2.0 * np.pi / (np.max(np.abs(log_x)) + 60.0))
    if height is None:
        height = _tail_height(log_theta, c, step, _TAIL_RATIO)

    n = int(np.ceil(height / step))
    t = step * np.arange(n + 1)
    lt = log_theta(c + 1j * t)
    shift = lt.real.max()
    coef = np.exp(lt - shift)
    coef[0] *= 0.5
    raw = mb_real_sum(coef, 0.0, step, log_x)
    l1 = np.abs(coef).sum()
    scale = np.exp(shift + log_scale - c * log_x) / np.pi

    # exp() of large cancelling logs loses about |log| ulps of relative accuracy
    log_mag = abs(shift) + abs(log_scale) + np.abs(c * log_x)
    value = scale * step * raw
    err = np.full_like(value, np.inf)
    while refine:
        half = 0.5 * step
        t_new = half + step * np.arange(n)
        lt_new = log_theta(c + 1j * t_new)
        coef_new = np.exp(lt_new - shift)
        raw = raw + mb_real_sum(coef_new, half, step, log_x)
        l1 += np.abs(coef_new).sum()
        new_value = scale * half * raw
        err = np.abs(new_value - value)
        value = new_value
        step = half
        n *= 2
        floor = 64.0 * np.finfo(float).eps * scale * step * l1 * (1.0 + log_mag)
        if np.all(err <= np.maximum(rtol * np.abs(value), floor)):
            err = np.maximum(err, floor)
            break
        if step < _MIN_STEP:
            raise ConvergenceError(
                "Mellin-Barnes quadrature did not converge",
                abscissa=c, height=height, step=step,
                worst_rel_change=float(np.max(err / np.maximum(np.abs(value), 1e-300))))
    return FoxHResult(value, err, step, height, c)


def fox_h(spec, x, *, rtol=1e-10, log_scale=0.0, step=None, height=None, refine=True):
    """Fox H-function ``H^{m,n}_{p,q}[x]`` for ``x > 0`` (scalar or array).

    Returns a :class:`FoxHResult` whose ``error`` is the absolute change of
    the last step halving, an upper estimate of the remaining error.

    Examples
    --------
    >>> round(float(fox_h(FoxHSpec(1, 1, ((0, 1),), ((0, 1),)), 1.0).value), 12)
    0.5
    """
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr <= 0):
        raise DomainError("fox_h: argument must be positive")
    if spec.decay_rate() <= 0:
        raise ConvergenceError("fox_h: integrand does not decay (a* <= 0)",
                               decay_rate=spec.decay_rate())
    c = spec.default_abscissa()
    res = contour_integral(spec.log_theta, np.log(x_arr), c, rtol=rtol,
                           log_scale=log_scale, step=step, height=height, refine=refine)
    if x_arr.ndim == 0:
        return res._replace(value=float(res.value[0]), error=float(res.error[0]))
    return res


def meijer_g(spec, x, **kwargs):
    """Meijer G-function; evaluated through :func:`fox_h` on the converted spec."""
    return fox_h(spec.to_fox(), x, **kwargs)
