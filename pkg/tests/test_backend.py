import numpy as np
import pytest

from smfading import _pykernels
from smfading._backend import BACKEND

kernels = pytest.importorskip("smfading._kernels")


def test_backend_selected():
    assert BACKEND in ("cython", "python")


def test_mb_real_sum_backends_agree(rng):
    coef = rng.standard_normal(500) + 1j * rng.standard_normal(500)
    log_x = rng.uniform(-20, 20, 300)
    a = kernels.mb_real_sum(coef, 0.01, 0.05, log_x)
    b = _pykernels.mb_real_sum(coef, 0.01, 0.05, log_x)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-12 * np.abs(coef).sum())


def test_polar_gains_backends_agree(rng):
    power = rng.exponential(size=1000)
    phase = rng.uniform(0, 2 * np.pi, 1000)
    a = np.asarray(kernels.polar_gains(power, phase))
    b = _pykernels.polar_gains(power, phase)
    assert np.allclose(a, b, rtol=1e-15, atol=1e-15)
    assert np.allclose(np.abs(a) ** 2, power)


@pytest.mark.parametrize("nt, nr, M", [(2, 1, 1), (8, 2, 1), (4, 3, 4), (1, 2, 8)])
def test_ml_bit_errors_backends_agree(rng, nt, nr, M):
    n = 2000
    H = rng.standard_normal((n, nr, nt)) + 1j * rng.standard_normal((n, nr, nt))
    noise = 0.7 * (rng.standard_normal((n, nr)) + 1j * rng.standard_normal((n, nr)))
    tx_ant = rng.integers(0, nt, n).astype(np.int64)
    tx_sym = rng.integers(0, M, n).astype(np.int64)
    j = np.arange(M)
    symbols = np.exp(2j * np.pi * j / M)
    ant_label = np.arange(nt, dtype=np.int64)
    sym_label = (j ^ (j >> 1)).astype(np.int64)
    args = (np.ascontiguousarray(H), np.ascontiguousarray(noise), tx_ant, tx_sym,
            symbols, ant_label, sym_label)
    a = np.asarray(kernels.ml_bit_errors(*args))
    b = np.asarray(_pykernels.ml_bit_errors(*args))
    assert np.array_equal(a, b)
    assert a.sum() > 0
