import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from smfading.errors import DomainError
from smfading.exactperf import (SM, SSK, SnrPoint, SystemConfig, abep_ssk_bound,
                                pep_exact)
from smfading.fading import BranchPair, EgkLinkParams, GeneralizedK, Nakagami
from smfading.montecarlo import (BerEstimate, ChannelRealization, StopRule,
                                 constellation, draw_channels, ml_detect,
                                 simulate_ber)

RAYLEIGH = Nakagami(1.0)
EGK_LINK = EgkLinkParams(1.5, 4.0, 2.0, 1.0)


def mrc_bpsk_rayleigh(gamma_b, n_branches):
    # textbook BPSK over L-branch Rayleigh maximal-ratio combining
    mu = math.sqrt(gamma_b / (1 + gamma_b))
    lo, hi = (1 - mu) / 2, (1 + mu) / 2
    return lo ** n_branches * sum(math.comb(n_branches - 1 + k, k) * hi ** k
                                  for k in range(n_branches))


# ---------------------------------------------------------------- primitives

def test_constellation_gray_labels():
    pts, labels = constellation(SystemConfig(2, 1, SM(8, 2.0), RAYLEIGH))
    assert np.allclose(np.abs(pts), 2.0)
    assert list(labels) == [0, 1, 3, 2, 6, 7, 5, 4]
    # adjacent points differ in exactly one bit
    assert all(bin(labels[i] ^ labels[(i + 1) % 8]).count("1") == 1 for i in range(8))
    pts, labels = constellation(SystemConfig(2, 1, SSK(), RAYLEIGH))
    assert list(pts) == [1.0] and list(labels) == [0]


def test_draw_channels_mean_power(rng):
    h = draw_channels(EGK_LINK.with_omega(2.0), rng, 100000, 2, 4)
    assert h.shape == (100000, 2, 4)
    p = np.abs(h) ** 2
    assert abs(p.mean() - 2.0) < 3 * p.std() / math.sqrt(p.size)
    # uniform phases: the complex mean vanishes
    assert abs(h.mean()) < 3 * math.sqrt(2.0 / h.size)


def test_channel_realization_shape():
    h = ChannelRealization(np.zeros((3, 4), dtype=complex))
    assert (h.n_r, h.n_t) == (3, 4)


def test_ml_detect_noiseless(rng):
    cfg = SystemConfig(4, 2, SM(4), RAYLEIGH)
    h = ChannelRealization(draw_channels(RAYLEIGH, rng, 1, 2, 4)[0])
    pts, _ = constellation(cfg)
    for t in range(4):
        for j in range(4):
            assert ml_detect(h.gains[:, t] * pts[j], h, cfg) == (t, j)
    ssk = SystemConfig(4, 2, SSK(), RAYLEIGH)
    assert ml_detect(h.gains[:, 1], h, ssk) == (1, 0)


def test_ml_detect_tie_break():
    cfg = SystemConfig(4, 2, SM(4), RAYLEIGH)
    h = np.ones((2, 4), dtype=complex)
    assert ml_detect(np.zeros(2), h, cfg) == (0, 0)


def test_ml_detect_shape_check():
    with pytest.raises(DomainError):
        ml_detect(np.zeros(3), np.ones((2, 4)), SystemConfig(4, 2, SSK(), RAYLEIGH))


# ---------------------------------------------------------------- BER oracles

@pytest.mark.parametrize("db", [0.0, 6.0, 12.0])
def test_qpsk_mrc_against_textbook(db):
    cfg = SystemConfig(1, 2, SM(4), RAYLEIGH)
    pt = SnrPoint(db)
    est = simulate_ber(cfg, pt, StopRule(4000, 10 ** 7), seed=11, workers=4)
    ref = mrc_bpsk_rayleigh(pt.gamma_bar, 2)
    assert abs(est.ber - ref) < 3 * est.std_error


@pytest.mark.parametrize("link", [RAYLEIGH, EGK_LINK, GeneralizedK(1.5, 1.0931)])
def test_two_antenna_ssk_is_exact_pep(link):
    cfg = SystemConfig(2, 1, SSK(), link)
    pt = SnrPoint(10.0)
    est = simulate_ber(cfg, pt, StopRule(5000, 10 ** 7), seed=2, workers=4)
    ref = pep_exact(BranchPair.iid(link), 1, pt.gamma_bar)
    assert abs(est.ber - ref) < 3 * est.std_error


@pytest.mark.parametrize("cfg", [
    SystemConfig(8, 1, SSK(), RAYLEIGH),
    SystemConfig(8, 2, SM(4), EGK_LINK),
])
def test_noise_dominated_ber_is_one_half(cfg):
    est = simulate_ber(cfg, SnrPoint(-40.0), StopRule(20000, 10 ** 6), seed=4)
    assert abs(est.ber - 0.5) < 3 * est.std_error


def test_noise_dominated_ber_keeps_square_root_bias():
    # the gap to 1/2 shrinks like sqrt(gamma_bar) and grows with the branch count;
    # with two antennas the exact PEP is the BER
    link = GeneralizedK(1.5, 1.0931)
    cfg = SystemConfig(2, 3, SSK(), link)
    pt = SnrPoint(-40.0)
    est = simulate_ber(cfg, pt, StopRule(10 ** 9, 4 * 10 ** 6), seed=4, workers=4)
    ref = pep_exact(BranchPair.iid(link), 3, pt.gamma_bar)
    assert abs(est.ber - ref) < 3 * est.std_error
    assert 0.003 < 0.5 - ref < 0.006


def test_bound_dominance_egk():
    cfg = SystemConfig(8, 2, SSK(), EGK_LINK)
    ratios = []
    for db in (0.0, 5.0, 10.0, 15.0, 20.0):
        est = simulate_ber(cfg, SnrPoint(db), StopRule(400, 10 ** 7), seed=1, workers=4)
        bound = abep_ssk_bound(cfg, SnrPoint(db))
        assert est.ber <= bound + 3 * est.std_error
        ratios.append(bound / est.ber)
    # the union bound tightens as the SNR grows
    assert np.all(np.diff(ratios[:4]) < 0)


# ---------------------------------------------------------------- determinism and bookkeeping

def test_seed_determinism_across_workers():
    cfg = SystemConfig(4, 2, SM(4), EGK_LINK)
    stop = StopRule(300, 10 ** 6)
    runs = [simulate_ber(cfg, 8.0, stop, seed=9, workers=w) for w in (1, 1, 3, 8)]
    assert all(r == runs[0] for r in runs)
    assert simulate_ber(cfg, 8.0, stop, seed=10) != runs[0]


def test_chunk_streams_are_independent_of_chunk_order():
    cfg = SystemConfig(2, 1, SSK(), RAYLEIGH)
    a = simulate_ber(cfg, 5.0, StopRule(10 ** 9, 50000), seed=3, workers=1)
    b = simulate_ber(cfg, 5.0, StopRule(10 ** 9, 50000), seed=3, workers=5)
    assert a == b
    assert a.bits_sent == 50000


def test_zero_errors_flagged():
    cfg = SystemConfig(2, 4, SSK(), Nakagami(3.0))
    est = simulate_ber(cfg, SnrPoint(60.0), StopRule(10, 5000), seed=0)
    assert est.bit_errors == 0 and est.upper_bound_only
    assert est.ci95_low == 0.0 and 0 < est.ci95_high < 1e-2


def test_stop_rule_fires_on_errors():
    cfg = SystemConfig(8, 1, SSK(), RAYLEIGH)
    est = simulate_ber(cfg, SnrPoint(0.0), StopRule(200, 10 ** 8), seed=0, chunk_trials=64)
    assert 200 <= est.bit_errors < 200 + 64 * 3
    with pytest.raises(DomainError):
        StopRule(0, 10)


def test_simulate_rejects_non_config():
    with pytest.raises(DomainError):
        simulate_ber("8x2", 10.0)


@settings(max_examples=15)
@given(st.integers(0, 2 ** 32 - 1), st.floats(-10.0, 25.0), st.sampled_from([2, 4, 8]))
def test_ber_estimate_invariants(seed, db, n_t):
    cfg = SystemConfig(n_t, 1, SSK(), EGK_LINK)
    est = simulate_ber(cfg, db, StopRule(50, 20000), seed=seed, chunk_trials=1024)
    assert isinstance(est, BerEstimate)
    assert est.ber == est.bit_errors / est.bits_sent
    assert 0.0 <= est.ci95_low <= est.ber <= est.ci95_high <= 1.0
    assert est.bits_sent == est.trials * cfg.bits_per_symbol
    assert est.snr_point == SnrPoint(db)
