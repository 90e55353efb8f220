"""Link-level Monte Carlo simulation of SSK / SM with ML detection.

Noise convention: with symbol energy ``Es`` and ``N0 = Es / (Es/N0)``, each
real and each imaginary noise component has variance ``N0``. Under this
convention the conditional pairwise error probability of two antenna
hypotheses is ``Q(sqrt(gamma_bar * Z))`` with ``gamma_bar = Es / (4 N0)``.

Trials are processed in fixed-size chunks; chunk ``k`` draws from the
stream ``SeedSequence([seed, k])`` and chunks are merged in index order, so
results do not depend on how many workers evaluate them.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import binomtest

from ._backend import ml_bit_errors, polar_gains
from .errors import DomainError
from .exactperf import SM, SnrPoint, SystemConfig
from .fading import sample_power

__all__ = [
    "ChannelRealization", "BerEstimate", "StopRule",
    "draw_channels", "constellation", "ml_detect", "simulate_ber",
]

CHUNK_TRIALS = 8192


@dataclass(frozen=True)
class ChannelRealization:
    """``n_r x n_t`` complex gains ``a * exp(j phi)``."""

    gains: np.ndarray

    @property
    def n_r(self):
        return self.gains.shape[0]

    @property
    def n_t(self):
        return self.gains.shape[1]


@dataclass(frozen=True)
class StopRule:
    """Stop at ``min_bit_errors`` errors or ``max_bits`` bits, whichever comes first."""

    min_bit_errors: int = 200
    max_bits: int = 10 ** 8

    def __post_init__(self):
        if self.min_bit_errors < 1 or self.max_bits < 1:
            raise DomainError("stop rule limits must be positive")


@dataclass(frozen=True)
class BerEstimate:
    """Bit error rate with a 95% Wilson interval.

    ``upper_bound_only`` marks runs that ended without a single error; the
    interval is then a one-sided bound. ``std_error`` accounts for errors
    of one trial being correlated (it uses per-trial error counts).
    """

    snr_point: SnrPoint
    bits_sent: int
    bit_errors: int
    ber: float
    ci95_low: float
    ci95_high: float
    trials: int = 0
    std_error: float = float("nan")
    upper_bound_only: bool = False


def constellation(cfg):
    """Unit-modulus-times-``kappa0`` PSK points and their Gray labels; SSK uses ``[1]``."""
    if isinstance(cfg.modulation, SM):
        M = cfg.modulation.M
        j = np.arange(M)
        points = cfg.modulation.kappa0 * np.exp(2j * np.pi * j / M)
        return points.astype(complex), (j ^ (j >> 1)).astype(np.int64)
    return np.ones(1, dtype=complex), np.zeros(1, dtype=np.int64)


def draw_channels(fading, rng, n, n_r, n_t):
    """``(n, n_r, n_t)`` i.i.d. channel gains with uniform phases on ``[0, 2 pi)``."""
    power = sample_power(fading, rng, n * n_r * n_t)
    phase = rng.uniform(0.0, 2.0 * np.pi, size=n * n_r * n_t)
    return polar_gains(power, phase).reshape(n, n_r, n_t)


def ml_detect(y, h, cfg):
    """Joint ML estimate ``(antenna, symbol)`` of one observation, 0-based.

    Minimizes ``||y - h[:, t] * chi_j||^2``; ties go to the lowest ``t``,
    then the lowest ``j``. For SSK the symbol index is always 0.
    """
    gains = h.gains if isinstance(h, ChannelRealization) else np.asarray(h)
    y = np.asarray(y, dtype=complex).reshape(-1)
    points, _ = constellation(cfg)
    if gains.shape != (y.size, cfg.n_t):
        raise DomainError(f"channel shape {gains.shape} does not match ({y.size}, {cfg.n_t})")
    diff = y[:, None, None] - gains[:, :, None] * points[None, None, :]
    metric = (diff.real ** 2 + diff.imag ** 2).sum(axis=0)
    t, j = np.unravel_index(int(np.argmin(metric)), metric.shape)
    return int(t), int(j)


def _chunk_trials(k, per_chunk, max_trials):
    start = k * per_chunk
    return max(0, min(per_chunk, max_trials - start))


def _run_chunk(cfg, es, n0, seed, k, n):
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, k])))
    points, sym_label = constellation(cfg)
    ant_label = np.arange(cfg.n_t, dtype=np.int64)
    H = draw_channels(cfg.fading, rng, n, cfg.n_r, cfg.n_t)
    tx_ant = rng.integers(0, cfg.n_t, size=n, dtype=np.int64)
    tx_sym = rng.integers(0, points.size, size=n, dtype=np.int64)
    noise = math.sqrt(n0) * (rng.standard_normal((n, cfg.n_r))
                             + 1j * rng.standard_normal((n, cfg.n_r)))
    errs = ml_bit_errors(np.ascontiguousarray(H), np.ascontiguousarray(noise),
                         tx_ant, tx_sym, math.sqrt(es) * points, ant_label, sym_label)
    errs = np.asarray(errs, dtype=np.int64)
    return int(errs.sum()), int((errs * errs).sum())


def simulate_ber(cfg, pt, stop=StopRule(), seed=0, *, workers=1, es=1.0,
                 chunk_trials=CHUNK_TRIALS):
    """Simulated BER of ``cfg`` at ``pt`` (``Es/N0`` in dB).

    Parameters
    ----------
    cfg : SystemConfig
    pt : SnrPoint or float
        The operating point; a float is read as ``Es/N0`` in dB.
    stop : StopRule
    seed : int
    workers : int
        Threads evaluating chunks ahead of the merge; does not change the result.

    Returns
    -------
    BerEstimate
    """
    if not isinstance(cfg, SystemConfig):
        raise DomainError("simulate_ber expects a SystemConfig")
    if cfg.n_t < 1:
        raise DomainError("need at least one transmit antenna")
    pt = pt if isinstance(pt, SnrPoint) else SnrPoint(float(pt))
    bits_per_trial = cfg.bits_per_symbol
    if bits_per_trial < 1:
        raise DomainError("configuration carries no bits")
    n0 = es / pt.es_over_n0
    max_trials = -(-int(stop.max_bits) // bits_per_trial)
    n_chunks = -(-max_trials // chunk_trials)

    errors = sq = trials = 0
    workers = max(1, int(workers))

    def job(k):
        n = _chunk_trials(k, chunk_trials, max_trials)
        return n, _run_chunk(cfg, es, n0, seed, k, n)

    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        k = 0
        done = False
        while k < n_chunks and not done:
            batch = range(k, min(k + workers, n_chunks))
            results = pool.map(job, batch) if pool else map(job, batch)
            for n, (e, s2) in results:
                errors += e
                sq += s2
                trials += n
                k += 1
                if errors >= stop.min_bit_errors or trials * bits_per_trial >= stop.max_bits:
                    done = True
                    break
    finally:
        if pool:
            pool.shutdown(wait=True, cancel_futures=True)

    bits = trials * bits_per_trial
    ci = binomtest(errors, bits).proportion_ci(0.95, method="wilson")
    ber = errors / bits
    # per-trial error counts are the independent unit
    mean_t = errors / trials
    var_t = max(sq / trials - mean_t * mean_t, 0.0)
    std = math.sqrt(var_t / trials) / bits_per_trial
    return BerEstimate(pt, bits, errors, ber, max(0.0, min(ci.low, ber)),
                       min(1.0, max(ci.high, ber)), trials, std, errors == 0)
