"""Pure-numpy versions of the compiled kernels in ``_kernels.pyx``.

Same signatures, same arithmetic order, so both backends agree to rounding.
"""

import numpy as np

_CHUNK_ELEMS = 1 << 21
_POPCOUNT = np.array([bin(i).count("1") for i in range(1 << 12)], dtype=np.int64)


def mb_real_sum(coef, t0, dt, log_x):
    coef = np.asarray(coef, dtype=complex)
    log_x = np.asarray(log_x, dtype=float)
    t = t0 + dt * np.arange(coef.size)
    out = np.empty(log_x.size)
    step = max(1, _CHUNK_ELEMS // max(coef.size, 1))
    for i in range(0, log_x.size, step):
        L = log_x[i:i + step]
        out[i:i + step] = (np.exp(-1j * np.outer(L, t)) @ coef).real
    return out


def polar_gains(power, phase):
    power = np.asarray(power, dtype=float)
    phase = np.asarray(phase, dtype=float)
    a = np.sqrt(power)
    out = np.empty(power.shape, dtype=complex)
    out.real = a * np.cos(phase)
    out.imag = a * np.sin(phase)
    return out


def _popcount(v):
    v = np.asarray(v, dtype=np.int64)
    if v.size and v.max() >= _POPCOUNT.size:
        return np.array([bin(int(x)).count("1") for x in v.ravel()]).reshape(v.shape)
    return _POPCOUNT[v]


def ml_bit_errors(H, noise, tx_ant, tx_sym, symbols, ant_label, sym_label):
    n, nr, nt = H.shape
    M = symbols.size
    idx = np.arange(n)
    y = H[idx, :, tx_ant] * symbols[tx_sym][:, None] + noise
    cand = H[:, :, :, None] * symbols[None, None, None, :]
    metric = np.zeros((n, nt, M))
    for r in range(nr):
        d = y[:, r, None, None] - cand[:, r]
        metric = metric + (d.real * d.real + d.imag * d.imag)
    flat = metric.reshape(n, nt * M).argmin(axis=1)
    t_hat, j_hat = np.divmod(flat, M)
    return (_popcount(ant_label[t_hat] ^ ant_label[tx_ant])
            + _popcount(sym_label[j_hat] ^ sym_label[tx_sym]))
