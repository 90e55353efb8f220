# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. ``_pykernels`` holds the numpy equivalents."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, sqrt

cnp.import_array()

cdef int _RENORM = 128


def mb_real_sum(const double complex[::1] coef, double t0, double dt,
                const double[::1] log_x):
    """Re sum_j coef[j] * exp(-1j * (t0 + j*dt) * log_x[k]) for every k."""
    cdef Py_ssize_t nk = log_x.shape[0]
    cdef Py_ssize_t nj = coef.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(nk, dtype=np.float64)
    cdef Py_ssize_t j, k
    cdef double L, acc, rr, ri, cr, ci, tmp, phase
    for k in range(nk):
        L = log_x[k]
        cr = cos(dt * L)
        ci = -sin(dt * L)
        acc = 0.0
        for j in range(nj):
            if j % _RENORM == 0:
                # exact restart bounds the drift of the rotation recurrence
                phase = (t0 + j * dt) * L
                rr = cos(phase)
                ri = -sin(phase)
            acc += coef[j].real * rr - coef[j].imag * ri
            tmp = rr * cr - ri * ci
            ri = rr * ci + ri * cr
            rr = tmp
        out[k] = acc
    return out


def polar_gains(const double[::1] power, const double[::1] phase):
    """sqrt(power) * exp(1j * phase), elementwise."""
    cdef Py_ssize_t n = power.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] o = out
    cdef Py_ssize_t i
    cdef double a
    with nogil:
        for i in range(n):
            a = sqrt(power[i])
            o[i].real = a * cos(phase[i])
            o[i].imag = a * sin(phase[i])
    return out


cdef inline int _popcount(long long v) nogil:
    cdef int c = 0
    while v:
        v &= v - 1
        c += 1
    return c


def ml_bit_errors(const double complex[:, :, ::1] H,
                  const double complex[:, ::1] noise,
                  const long long[::1] tx_ant,
                  const long long[::1] tx_sym,
                  const double complex[::1] symbols,
                  const long long[::1] ant_label,
                  const long long[::1] sym_label):
    """Exhaustive ML detection over (antenna, symbol); bit errors per trial.

    ``H`` is (trials, n_r, n_t); ``symbols`` already carries sqrt(Es).
    Ties go to the lowest (antenna, symbol) pair in antenna-major order.
    """
    cdef Py_ssize_t n = H.shape[0]
    cdef Py_ssize_t nr = H.shape[1]
    cdef Py_ssize_t nt = H.shape[2]
    cdef Py_ssize_t M = symbols.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] errors = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t i, r, t, j, bt, bj
    cdef double yr[64]
    cdef double yi[64]
    cdef double hr, hi, sr, si, dr, di, metric, best
    if nr > 64:
        raise ValueError("at most 64 receive antennas")
    with nogil:
        for i in range(n):
            sr = symbols[tx_sym[i]].real
            si = symbols[tx_sym[i]].imag
            for r in range(nr):
                hr = H[i, r, tx_ant[i]].real
                hi = H[i, r, tx_ant[i]].imag
                yr[r] = (hr * sr - hi * si) + noise[i, r].real
                yi[r] = (hr * si + hi * sr) + noise[i, r].imag
            best = 1e308
            bt = 0
            bj = 0
            for t in range(nt):
                for j in range(M):
                    sr = symbols[j].real
                    si = symbols[j].imag
                    metric = 0.0
                    for r in range(nr):
                        hr = H[i, r, t].real
                        hi = H[i, r, t].imag
                        dr = yr[r] - (hr * sr - hi * si)
                        di = yi[r] - (hr * si + hi * sr)
                        metric = metric + (dr * dr + di * di)
                    if metric < best:
                        best = metric
                        bt = t
                        bj = j
            errors[i] = (_popcount(ant_label[bt] ^ ant_label[tx_ant[i]])
                         + _popcount(sym_label[bj] ^ sym_label[tx_sym[i]]))
    return errors
