"""Finite-SNR error probabilities of SSK and SM over i.i.d. generalized fading.

SNR convention: the sweep axis is ``Es/N0`` in dB and every formula here
takes ``gamma_bar = Es / (4 N0)``; :class:`SnrPoint` is the only place that
converts between the two.
"""

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import asymptotics
from .errors import ConvergenceError, DomainError
from .fading import (BranchPair, diversity_order, kernel_on_log_grid,
                     mgf_link_snr, power_mgf_tail)

__all__ = [
    "Mode", "SSK", "SM", "SystemConfig", "SnrPoint", "SmComponents", "DiversityReport",
    "mgf_z", "pep_exact", "pep", "abep_ssk_bound", "abep_signal_mpsk",
    "sm_multipliers", "sm_components", "abep_sm_bound", "abep_bound", "diversity_report",
]


class Mode(enum.Enum):
    EXACT = "exact"
    ASYMPTOTIC = "asymptotic"


def _log2_int(n, name):
    n = int(n)
    if n < 1 or n & (n - 1):
        raise DomainError(f"{name} must be a power of two, got {n}")
    return n.bit_length() - 1


@dataclass(frozen=True)
class SSK:
    """Space shift keying: the active antenna index carries all the bits."""

    def bits_per_symbol(self, n_t):
        return _log2_int(n_t, "n_t")


@dataclass(frozen=True)
class SM:
    """Spatial modulation with Gray-mapped M-PSK of constant modulus ``kappa0``.

    ``scale_mode`` selects how the modulus enters the SNR: ``"squared"``
    (energy, ``kappa0**2``, the default) or ``"linear"`` (``kappa0``).
    """

    M: int = 4
    kappa0: float = 1.0
    scale_mode: str = "squared"

    def __post_init__(self):
        _log2_int(self.M, "M")
        if self.M < 2:
            raise DomainError("M must be at least 2")
        if not (self.kappa0 > 0 and math.isfinite(self.kappa0)):
            raise DomainError("kappa0 must be positive")
        if self.scale_mode not in ("squared", "linear"):
            raise DomainError("scale_mode must be 'squared' or 'linear'")

    @property
    def modulus_scale(self):
        """Factor applied to ``gamma_bar`` by the constellation modulus."""
        return self.kappa0 ** 2 if self.scale_mode == "squared" else self.kappa0

    def bits_per_symbol(self, n_t):
        return _log2_int(n_t, "n_t") + _log2_int(self.M, "M")


@dataclass(frozen=True)
class SystemConfig:
    """``n_t x n_r`` link with every transmit/receive pair drawn i.i.d. from ``fading``."""

    n_t: int
    n_r: int
    modulation: object = field(default_factory=SSK)
    fading: object = None

    def __post_init__(self):
        _log2_int(self.n_t, "n_t")
        if self.n_t < 2 and isinstance(self.modulation, SSK):
            raise DomainError("SSK needs at least two transmit antennas")
        if int(self.n_r) != self.n_r or self.n_r < 1:
            raise DomainError("n_r must be a positive integer")
        if not isinstance(self.modulation, (SSK, SM)):
            raise DomainError("modulation must be SSK() or SM(...)")
        BranchPair.iid(self.fading)  # validates the fading parameters

    @property
    def branch(self):
        return BranchPair.iid(self.fading)

    @property
    def is_sm(self):
        return isinstance(self.modulation, SM)

    @property
    def bits_per_symbol(self):
        return self.modulation.bits_per_symbol(self.n_t)


@dataclass(frozen=True)
class SnrPoint:
    """One point of the SNR axis, given as ``Es/N0`` in dB."""

    es_over_n0_db: float

    @property
    def es_over_n0(self):
        return 10.0 ** (self.es_over_n0_db / 10.0)

    @property
    def gamma_bar(self):
        """``Es / (4 N0)``, the SNR entering every error-probability formula."""
        return self.es_over_n0 / 4.0

    @classmethod
    def from_gamma_bar(cls, gamma_bar):
        return cls(10.0 * math.log10(4.0 * gamma_bar))


# --------------------------------------------------------------------------
# MGF of the branch difference variable
# --------------------------------------------------------------------------

_RHO_STEP = 0.05
_BLOCK = 10.0                      # log-R width of one cached kernel block
_BLOCK_N = int(round(_BLOCK / _RHO_STEP))
_RHO_FLOOR = -30.0                 # below this both kernels equal 1 in double precision
_U_LOW = -20.0                     # log u window of 2 u^2 exp(-u^2)
_U_HIGH = 2.0
_MGF_RTOL = 1e-7


def _kernel_window(link, k_lo, k_hi):
    """Kernel on ``log R = k * _RHO_STEP`` for integer ``k_lo <= k < k_hi``."""
    out = np.ones(k_hi - k_lo)
    err = np.zeros(k_hi - k_lo)
    k_floor = int(math.floor(_RHO_FLOOR / _RHO_STEP))
    for b in range(math.floor(k_lo / _BLOCK_N), math.ceil(k_hi / _BLOCK_N)):
        b_lo, b_hi = b * _BLOCK_N, (b + 1) * _BLOCK_N
        if b_hi <= k_floor:
            continue
        vals, errs = kernel_on_log_grid(link, b_lo * _RHO_STEP, _RHO_STEP, _BLOCK_N)
        lo, hi = max(b_lo, k_lo), min(b_hi, k_hi)
        if lo < hi:
            out[lo - k_lo:hi - k_lo] = vals[lo - b_lo:hi - b_lo]
            err[lo - k_lo:hi - k_lo] = errs[lo - b_lo:hi - b_lo]
    return out, err


def _mgf_z_values(pair, s):
    """Trapezoid sums at step h and 2h, plus the kernel error contribution."""
    shift = np.log(2.0 * np.sqrt(s))            # log R = log u + shift
    k_lo = int(math.floor((shift.min() + _U_LOW) / _RHO_STEP))
    k_hi = int(math.ceil((shift.max() + _U_HIGH) / _RHO_STEP)) + 1
    k1, e1 = _kernel_window(pair.first, k_lo, k_hi)
    if pair.second == pair.first:
        k2, e2 = k1, e1
    else:
        k2, e2 = _kernel_window(pair.second, k_lo, k_hi)
    prod = k1 * k2
    perr = np.abs(k1) * e2 + np.abs(k2) * e1
    rho = _RHO_STEP * np.arange(k_lo, k_hi)
    w = rho[None, :] - shift[:, None]
    u2 = np.exp(2.0 * w)
    weight = 2.0 * u2 * np.exp(-u2)
    fine = _RHO_STEP * (weight @ prod)
    even = (np.arange(k_lo, k_hi) % 2) == 0
    coarse = 2.0 * _RHO_STEP * (weight[:, even] @ prod[even])
    kerr = _RHO_STEP * (weight @ perr)
    return fine, coarse, kerr


def mgf_z(pair, s, *, with_error=False):
    """``E[exp(-s Z)]`` for ``Z = |z_2 - z_1|^2`` with independent uniform phases.

    Uses ``2 int_0^inf u exp(-u^2) K_1(2 sqrt(s) u) K_2(2 sqrt(s) u) du``
    with the trapezoidal rule in ``log u`` on a grid shared by all ``s``,
    so each link's Hankel kernel is evaluated once and reused.

    Raises
    ------
    ConvergenceError
        If halving the step changes the result by more than ``1e-7`` relative.
    """
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr <= 0) or not np.all(np.isfinite(s_arr)):
        raise DomainError("mgf_z: s must be positive and finite")
    flat = np.atleast_1d(s_arr).ravel()
    fine, coarse, kerr = _mgf_z_values(pair, flat)
    err = np.abs(fine - coarse) + kerr
    if np.any(err > _MGF_RTOL * np.abs(fine)):
        bad = int(np.argmax(err / np.abs(fine)))
        raise ConvergenceError("mgf_z quadrature did not reach 1e-7 relative accuracy",
                               s=float(flat[bad]), value=float(fine[bad]), error=float(err[bad]))
    value = np.minimum(fine, 1.0)
    shape = s_arr.shape
    value = value.reshape(shape) if shape else float(value[0])
    if with_error:
        return value, (err.reshape(shape) if shape else float(err[0]))
    return value


# --------------------------------------------------------------------------
# theta quadrature
# --------------------------------------------------------------------------

_GL = {n: np.polynomial.legendre.leggauss(n) for n in (64, 128)}
_THETA_TOL = 1e-9
_MAX_DEPTH = 12


def _gl(func, a, b, n):
    x, w = _GL[n]
    half = 0.5 * (b - a)
    return half * (w @ func(a + half * (x + 1.0)))


def _layer_breaks(width, end):
    """Geometric panel ends resolving a boundary layer of ``width`` at theta = 0."""
    lo = 1e-3 * width
    if lo >= end / 4.0:
        return (0.0, end)
    k = int(math.ceil(math.log2(end / lo)))
    return (0.0,) + tuple(end * 0.5 ** np.arange(k, -1, -1))


def _theta_integral(func, a, b, breaks=None):
    """Gauss-Legendre with a 64/128-node check; bisects where they disagree."""
    total = 0.0
    edges = (a, b) if breaks is None else breaks
    stack = [(lo, hi, 0) for lo, hi in zip(edges[:-1], edges[1:])]
    coarse_scale = abs(_gl(func, a, b, 64))
    while stack:
        lo, hi, depth = stack.pop()
        q64 = _gl(func, lo, hi, 64)
        q128 = _gl(func, lo, hi, 128)
        if abs(q128 - q64) <= _THETA_TOL * max(abs(q128), coarse_scale * (hi - lo) / (b - a)):
            total += q128
        elif depth >= _MAX_DEPTH:
            raise ConvergenceError("theta quadrature did not converge",
                                   interval=(lo, hi), difference=abs(q128 - q64))
        else:
            mid = 0.5 * (lo + hi)
            stack.extend([(lo, mid, depth + 1), (mid, hi, depth + 1)])
    return total


def pep_exact(pair, n_r, a_scale):
    """``(1/pi) int_0^{pi/2} mgf_z(A / (2 sin^2 t))^{n_r} dt``."""
    n_r = int(n_r)
    if n_r < 1:
        raise DomainError("n_r must be >= 1")
    a = float(a_scale)
    if not a > 0:
        raise DomainError("a_scale must be positive")

    def integrand(theta):
        return mgf_z(pair, a / (2.0 * np.sin(theta) ** 2)) ** n_r

    # mgf_z(s) turns over where s ~ 1, i.e. theta ~ sqrt(A / 2)
    breaks = _layer_breaks(math.sqrt(0.5 * a), 0.5 * math.pi)
    return _theta_integral(integrand, 0.0, 0.5 * math.pi, breaks) / math.pi


@lru_cache(maxsize=128)
def _coefficient(pair):
    return asymptotics.coefficient(pair)


def pep(pair, n_r, a_scale, mode=Mode.EXACT):
    """Pairwise error probability, exact or high-SNR."""
    if Mode(mode) is Mode.EXACT:
        return pep_exact(pair, n_r, a_scale)
    return asymptotics.asym_pep([_coefficient(pair)] * int(n_r), a_scale)


# --------------------------------------------------------------------------
# ABEP bounds
# --------------------------------------------------------------------------

def _snr(pt):
    return pt if isinstance(pt, SnrPoint) else SnrPoint(float(pt))


def abep_ssk_bound(cfg, pt, mode=Mode.EXACT):
    """``(n_t / 2) * PEP`` at ``A = gamma_bar``; unclipped, may exceed one."""
    if cfg.is_sm:
        raise DomainError("abep_ssk_bound needs an SSK configuration")
    return 0.5 * cfg.n_t * pep(cfg.branch, cfg.n_r, _snr(pt).gamma_bar, mode)


def _psk_theta_end(M):
    return (M - 1) * math.pi / M


def abep_signal_mpsk(cfg, pt, mode=Mode.EXACT):
    """Bit error contribution of the Gray-mapped M-PSK symbol over ``n_r``-branch MRC.

    Symbol error probability from the MGF form
    ``(1/pi) int_0^{(M-1)pi/M} prod_l M_l(sin^2(pi/M) / sin^2 t) dt`` with
    per-branch symbol SNR ``2 * scale * gamma_bar * a^2``, divided by
    ``log2 M`` (one bit per nearest-neighbour symbol error).
    """
    if not cfg.is_sm:
        raise DomainError("abep_signal_mpsk needs an SM configuration")
    mod = cfg.modulation
    M = mod.M
    snr = 2.0 * mod.modulus_scale * _snr(pt).gamma_bar
    g = math.sin(math.pi / M) ** 2
    end = _psk_theta_end(M)
    n_r = cfg.n_r
    if Mode(mode) is Mode.EXACT:
        def integrand(theta):
            return mgf_link_snr(cfg.fading, snr, g / np.sin(theta) ** 2) ** n_r
    else:
        C, d = power_mgf_tail(cfg.fading)
        const = (C * (snr * g) ** (-d)) ** n_r

        def integrand(theta):
            return const * np.sin(theta) ** (2.0 * d * n_r)
    breaks = _layer_breaks(math.sqrt(snr * g), end) if Mode(mode) is Mode.EXACT else None
    sep = _theta_integral(integrand, 0.0, end, breaks) / math.pi
    return sep / math.log2(M)


def sm_multipliers(n_t, M):
    """Exact rational multipliers of ``PEP_SM`` in the spatial and joint terms."""
    lt, lm = _log2_int(n_t, "n_t"), _log2_int(M, "M")
    den = 2 * (lt + lm)
    spatial = Fraction(n_t * lt, den)
    joint = Fraction(M * (n_t - 1) * lm + n_t * (M - 1) * lt, den)
    return spatial, joint


@dataclass(frozen=True)
class SmComponents:
    signal: float
    spatial: float
    joint: float

    @property
    def total(self):
        return self.signal + self.spatial + self.joint


def sm_components(cfg, pt, mode=Mode.EXACT):
    """The three SM bound terms; ``PEP_SM`` is taken at ``A = scale * gamma_bar``."""
    if not cfg.is_sm:
        raise DomainError("sm_components needs an SM configuration")
    pt = _snr(pt)
    mod = cfg.modulation
    pep_sm = pep(cfg.branch, cfg.n_r, mod.modulus_scale * pt.gamma_bar, mode)
    spatial, joint = sm_multipliers(cfg.n_t, mod.M)
    return SmComponents(abep_signal_mpsk(cfg, pt, mode),
                        float(spatial) * pep_sm, float(joint) * pep_sm)


def abep_sm_bound(cfg, pt, mode=Mode.EXACT):
    """Signal + spatial + joint bound for SM; unclipped."""
    return sm_components(cfg, pt, mode).total


def abep_bound(cfg, pt, mode=Mode.EXACT):
    """Dispatch to the SSK or SM bound."""
    return abep_sm_bound(cfg, pt, mode) if cfg.is_sm else abep_ssk_bound(cfg, pt, mode)


@dataclass(frozen=True)
class DiversityReport:
    """Diversity orders of the bound components; ``None`` where a term is absent."""

    spatial: float
    joint: float
    signal: float
    signal_per_branch: float
    overall: float


def diversity_report(cfg):
    """Diversity of each bound component.

    Spatial and joint terms have diversity ``n_r`` regardless of fading. The
    M-PSK term has ``n_r * min_k m_k beta_k / 2`` (for Generalized-K this is
    ``n_r * min(m, m_s)``). The overall order is the smallest of them.
    """
    n_r = float(cfg.n_r)
    if not cfg.is_sm:
        return DiversityReport(n_r, None, None, None, n_r)
    per_branch = diversity_order(cfg.fading)
    signal = n_r * per_branch
    return DiversityReport(n_r, n_r, signal, per_branch, min(n_r, signal))
