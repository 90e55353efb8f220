"""Gauss hypergeometric function 2F1(a, b; c; z) for real z < 1."""

import math

import numpy as np

from ..errors import ConvergenceError, DomainError
from .gamma import log_gamma_real

__all__ = ["gauss_2f1", "hyp2f1_with_error"]

_MAX_TERMS = 5_000_000
_BLOCK = 4096
_SERIES_LIMIT = 0.99999
_DEGENERATE_GAP = 1e-2
_SPLIT_DELTA = 1e-3


def _is_nonpositive_int(x, tol=0.0):
    return x <= tol and abs(x - round(x)) <= tol


def _series(a, b, c, z):
    """Direct power series; returns (value, abs error estimate).

    Terms are generated in numpy blocks (running products of the term
    ratios) so that slowly convergent arguments near z = 1 stay cheap.
    """
    total = 1.0
    mag = 1.0
    last = 1.0
    n0 = 0
    while n0 < _MAX_TERMS:
        n = np.arange(n0, n0 + _BLOCK, dtype=float)
        ratios = (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z
        terms = last * np.cumprod(ratios)
        total += terms.sum()
        mag = max(mag, float(np.max(np.abs(terms))))
        last = terms[-1]
        n0 += _BLOCK
        if last == 0.0 or not np.isfinite(last):
            break
        tail_ratio = abs(ratios[-1])
        if tail_ratio < 1.0 and abs(last) / (1.0 - tail_ratio) <= 1e-17 * abs(total):
            break
    else:
        raise ConvergenceError("2F1 series did not converge", a=a, b=b, c=c, z=z)
    # cancellation between large alternating terms dominates the rounding error
    err = 4.0 * np.finfo(float).eps * (mag + abs(total))
    return total, err


def _signed_gamma_ratio(num, den):
    lg_n, s_n = log_gamma_real(np.asarray(num, dtype=float))
    lg_d, s_d = log_gamma_real(np.asarray(den, dtype=float))
    return float(np.prod(s_n) * np.prod(s_d)), float(np.sum(lg_n) - np.sum(lg_d))


def _one_minus_z(a, b, c, z):
    """Connection formula toward 1 - z, for z in (0.5, 1) and c - a - b not an integer."""
    w = 1.0 - z
    s = c - a - b
    f1, e1 = _series(a, b, 1.0 - s, w)
    f2, e2 = _series(c - a, c - b, 1.0 + s, w)
    g1, l1 = 1.0, -np.inf
    g2, l2 = 1.0, -np.inf
    # a zero of 1/Gamma at a non-positive integer removes that branch exactly
    if not (_is_nonpositive_int(c - a) or _is_nonpositive_int(c - b)):
        g1, l1 = _signed_gamma_ratio([c, s], [c - a, c - b])
    if not (_is_nonpositive_int(a) or _is_nonpositive_int(b)):
        g2, l2 = _signed_gamma_ratio([c, -s], [a, b])
        l2 += s * math.log(w)
    t1 = g1 * math.exp(l1) * f1 if np.isfinite(l1) else 0.0
    t2 = g2 * math.exp(l2) * f2 if np.isfinite(l2) else 0.0
    val = t1 + t2
    err = (abs(t1) * (e1 / max(abs(f1), 1e-300)) + abs(t2) * (e2 / max(abs(f2), 1e-300))
           + 8.0 * np.finfo(float).eps * (abs(t1) + abs(t2)))
    return val, err


def _upper(a, b, c, z):
    """2F1 for z in (0.5, 1)."""
    # the direct series has no cancellation for positive parameters and still
    # converges geometrically this far out; the connection formula does not
    # behave as well when c - a - b is close to an integer
    if z <= 0.9 or (z <= _SERIES_LIMIT and a > 0 and b > 0 and c > 0):
        return _series(a, b, c, z)
    s = c - a - b
    if abs(s - round(s)) > _DEGENERATE_GAP:
        return _one_minus_z(a, b, c, z)
    # Richardson-extrapolated symmetric split in b removes the O(delta^2) bias
    d = _SPLIT_DELTA

    def sym(delta):
        vp, ep = _one_minus_z(a, b + delta, c, z)
        vm, em = _one_minus_z(a, b - delta, c, z)
        return 0.5 * (vp + vm), 0.5 * (ep + em)

    v1, e1 = sym(d)
    v2, e2 = sym(2 * d)
    val = (4.0 * v1 - v2) / 3.0
    return val, abs(v1 - v2) * 1e-2 + 2.0 * (e1 + e2)


def hyp2f1_with_error(a, b, c, z):
    """``2F1(a, b; c; z)`` together with an absolute error estimate.

    Power series on ``|z| <= 0.5``; the Pfaff transformation
    ``(1 - z)^(-a) 2F1(a, c - b; c; z / (z - 1))`` for ``z < 0``. On
    ``(0.5, 1)`` the series is kept while it converges without cancellation
    and the ``1 - z`` connection formula takes over near ``z = 1``.
    """
    a, b, c, z = float(a), float(b), float(c), float(z)
    if _is_nonpositive_int(c):
        raise DomainError(f"gauss_2f1: c = {c:g} is a non-positive integer")
    if not z < 1.0:
        raise DomainError(f"gauss_2f1: requires z < 1, got z = {z!r}")
    if z == 0.0 or a == 0.0 or b == 0.0:
        return 1.0, 0.0
    if abs(z) <= 0.5:
        return _series(a, b, c, z)
    if z > 0.5:
        return _upper(a, b, c, z)
    w = z / (z - 1.0)
    pref = (1.0 - z) ** (-a)
    inner, err = _series(a, c - b, c, w) if w <= 0.5 else _upper(a, c - b, c, w)
    return pref * inner, pref * err


def gauss_2f1(a, b, c, z):
    """Gauss hypergeometric function ``2F1(a, b; c; z)`` for real ``z < 1``.

    Examples
    --------
    >>> round(gauss_2f1(1, 1, 2, 0.5), 7)
    1.3862944
    """
    return hyp2f1_with_error(a, b, c, z)[0]
