# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled link-budget kernels; see ``_pykernels`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.math cimport pow, sqrt, fabs

cnp.import_array()


def received_power_matrix(user_xy, station_xy, tx_power, double alpha, double side, double d_min):
    cdef const double[:, ::1] u = np.ascontiguousarray(user_xy, dtype=np.float64).reshape(-1, 2)
    cdef const double[:, ::1] s = np.ascontiguousarray(station_xy, dtype=np.float64).reshape(-1, 2)
    cdef const double[::1] p = np.ascontiguousarray(tx_power, dtype=np.float64)
    cdef Py_ssize_t nu = u.shape[0], ns = s.shape[0], i, j
    out = np.empty((nu, ns), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef double dx, dy, d, g, neg_alpha = -alpha
    # integer exponents (the common 3 and 4) avoid libm pow
    cdef int n_int = <int>alpha if alpha == <int>alpha and 0 < alpha <= 8 else 0
    cdef int m
    for i in range(nu):
        for j in range(ns):
            dx = fabs(u[i, 0] - s[j, 0])
            dy = fabs(u[i, 1] - s[j, 1])
            if side - dx < dx:
                dx = side - dx
            if side - dy < dy:
                dy = side - dy
            d = sqrt(dx * dx + dy * dy)
            if d < d_min:
                d = d_min
            if n_int:
                g = d
                for m in range(n_int - 1):
                    g = g * d
                o[i, j] = p[j] / g
            else:
                o[i, j] = p[j] * pow(d, neg_alpha)
    return out


def best_per_tier(rx, station_tier, Py_ssize_t n_tiers):
    cdef const double[:, ::1] r = np.ascontiguousarray(rx, dtype=np.float64)
    cdef const cnp.int64_t[::1] tier = np.ascontiguousarray(station_tier, dtype=np.int64)
    cdef Py_ssize_t nu = r.shape[0], ns = r.shape[1], i, j, k
    best_idx = np.full((nu, n_tiers), -1, dtype=np.int64)
    best_rx = np.zeros((nu, n_tiers), dtype=np.float64)
    cdef cnp.int64_t[:, ::1] bi = best_idx
    cdef double[:, ::1] br = best_rx
    for i in range(nu):
        for j in range(ns):
            k = tier[j]
            if bi[i, k] < 0 or r[i, j] > br[i, k]:
                bi[i, k] = j
                br[i, k] = r[i, j]
    return best_idx, best_rx


def band_interference_excluding(rx, station_band, candidates):
    cdef const double[:, ::1] r = np.ascontiguousarray(rx, dtype=np.float64)
    cdef const cnp.int64_t[::1] band = np.ascontiguousarray(station_band, dtype=np.int64)
    cdef const cnp.int64_t[:, ::1] cand = np.ascontiguousarray(candidates, dtype=np.int64)
    cdef Py_ssize_t nu = cand.shape[0], nc = cand.shape[1], ns = r.shape[1], i, j, k
    cdef cnp.int64_t c, b
    cdef double acc
    out = np.zeros((nu, nc), dtype=np.float64)
    cdef double[:, ::1] o = out
    for i in range(nu):
        for k in range(nc):
            c = cand[i, k]
            if c < 0:
                continue
            b = band[c]
            acc = 0.0
            for j in range(ns):
                if band[j] == b and j != c:
                    acc += r[i, j]
            o[i, k] = acc
    return out


def cochannel_interference(rx, station_band, active_idx, serving):
    cdef const double[:, ::1] r = np.ascontiguousarray(rx, dtype=np.float64)
    cdef const cnp.int64_t[::1] band = np.ascontiguousarray(station_band, dtype=np.int64)
    cdef const cnp.int64_t[::1] act = np.ascontiguousarray(active_idx, dtype=np.int64)
    cdef const cnp.int64_t[::1] srv = np.ascontiguousarray(serving, dtype=np.int64)
    cdef Py_ssize_t nu = srv.shape[0], na = act.shape[0], i, a
    cdef cnp.int64_t s, b, j
    cdef double acc
    out = np.zeros(nu, dtype=np.float64)
    cdef double[::1] o = out
    for i in range(nu):
        s = srv[i]
        b = band[s]
        acc = 0.0
        for a in range(na):
            j = act[a]
            if j != s and band[j] == b:
                acc += r[i, j]
        o[i] = acc
    return out
