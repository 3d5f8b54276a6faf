# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled state-vector kernels. Same contract as ``_kernels_py``."""

import numpy as np


cdef inline void _split(tuple dims, Py_ssize_t pos, Py_ssize_t *outer,
                        Py_ssize_t *dim, Py_ssize_t *inner):
    cdef Py_ssize_t i, n = len(dims)
    outer[0] = 1
    inner[0] = 1
    for i in range(pos):
        outer[0] *= <Py_ssize_t>dims[i]
    for i in range(pos + 1, n):
        inner[0] *= <Py_ssize_t>dims[i]
    dim[0] = <Py_ssize_t>dims[pos]


def apply_matrix(const double complex[::1] amps, tuple dims, Py_ssize_t pos,
                 const double complex[:, ::1] mat):
    cdef Py_ssize_t outer, dim, inner
    _split(dims, pos, &outer, &dim, &inner)
    out = np.zeros(amps.shape[0], dtype=np.complex128)
    cdef double complex[::1] o = out
    cdef Py_ssize_t a, i, k, n, base
    cdef double complex acc
    for a in range(outer):
        base = a * dim * inner
        for i in range(dim):
            for n in range(inner):
                acc = 0
                for k in range(dim):
                    acc = acc + mat[i, k] * amps[base + k * inner + n]
                o[base + i * inner + n] = acc
    return out


def apply_controlled(const double complex[::1] amps, tuple dims,
                     Py_ssize_t control, Py_ssize_t target,
                     const double complex[:, :, ::1] mats):
    cdef Py_ssize_t oc, dc, ic, ot, dt, it
    _split(dims, control, &oc, &dc, &ic)
    _split(dims, target, &ot, &dt, &it)
    cdef Py_ssize_t size = amps.shape[0]
    out = np.zeros(size, dtype=np.complex128)
    cdef double complex[::1] o = out
    cdef Py_ssize_t idx, c, t, t2, base
    cdef double complex v, m
    for idx in range(size):
        v = amps[idx]
        if v.real == 0 and v.imag == 0:
            continue
        c = (idx // ic) % dc
        t = (idx // it) % dt
        base = idx - t * it
        for t2 in range(dt):
            m = mats[c, t2, t]
            if m.real != 0 or m.imag != 0:
                o[base + t2 * it] = o[base + t2 * it] + m * v
    return out


def marginal_probs(const double complex[::1] amps, tuple dims, Py_ssize_t pos):
    cdef Py_ssize_t outer, dim, inner
    _split(dims, pos, &outer, &dim, &inner)
    out = np.zeros(dim, dtype=np.float64)
    cdef double[::1] p = out
    cdef Py_ssize_t a, k, n, j
    cdef double complex v
    for a in range(outer):
        for k in range(dim):
            j = (a * dim + k) * inner
            for n in range(inner):
                v = amps[j + n]
                p[k] += v.real * v.real + v.imag * v.imag
    return out


def collapse(const double complex[::1] amps, tuple dims, Py_ssize_t pos,
             Py_ssize_t outcome, double scale):
    cdef Py_ssize_t outer, dim, inner
    _split(dims, pos, &outer, &dim, &inner)
    out = np.zeros(amps.shape[0], dtype=np.complex128)
    cdef double complex[::1] o = out
    cdef Py_ssize_t a, n, j
    for a in range(outer):
        j = (a * dim + outcome) * inner
        for n in range(inner):
            o[j + n] = amps[j + n] * scale
    return out
