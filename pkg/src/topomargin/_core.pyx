# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: persistence pairing and skip-gram training.

Mirrors _core_py.py operation-for-operation (same splitmix64 stream, same
IEEE double arithmetic order) so both backends return identical outputs.
"""

from libc.math cimport exp
from libc.stdint cimport int64_t, uint64_t
from libcpp.vector cimport vector

import numpy as np


cdef inline uint64_t _next_u64(uint64_t* state) noexcept nogil:
    state[0] = state[0] + <uint64_t>0x9E3779B97F4A7C15
    cdef uint64_t z = state[0]
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef void _symdiff(vector[int64_t]& a, vector[int64_t]& b, vector[int64_t]& out) noexcept nogil:
    out.clear()
    cdef size_t i = 0, j = 0
    cdef int64_t x, y
    while i < a.size() and j < b.size():
        x = a[i]
        y = b[j]
        if x < y:
            out.push_back(x)
            i += 1
        elif y < x:
            out.push_back(y)
            j += 1
        else:
            i += 1
            j += 1
    while i < a.size():
        out.push_back(a[i])
        i += 1
    while j < b.size():
        out.push_back(b[j])
        j += 1


def reduce_boundary(int64_t[::1] offsets, int64_t[::1] rows, int64_t[::1] dims, int max_dim):
    """Z/2 column reduction with clearing; see _core_py.reduce_boundary."""
    cdef Py_ssize_t m = dims.shape[0]
    partner_arr = np.full(m, -1, dtype=np.int64)
    cdef int64_t[::1] partner = partner_arr
    cdef vector[int64_t] owner = vector[int64_t](m, -1)
    cdef vector[char] cleared = vector[char](m, 0)
    cdef vector[int64_t] stored_at = vector[int64_t](m, -1)
    cdef vector[vector[int64_t]] pool
    cdef vector[int64_t] col, tmp
    cdef Py_ssize_t j
    cdef int64_t i, low, k
    cdef int d
    with nogil:
        for d in range(max_dim, 0, -1):
            pool.clear()
            for j in range(m):
                if dims[j] != d or cleared[j]:
                    continue
                col.clear()
                for i in range(offsets[j], offsets[j + 1]):
                    col.push_back(rows[i])
                while col.size() > 0:
                    low = col.back()
                    k = owner[low]
                    if k < 0:
                        owner[low] = j
                        partner[low] = j
                        partner[j] = low
                        cleared[low] = 1
                        stored_at[j] = <int64_t>pool.size()
                        pool.push_back(col)
                        break
                    _symdiff(col, pool[stored_at[k]], tmp)
                    col.swap(tmp)
    return partner_arr


def sgns_train(int64_t[::1] walks, int64_t[::1] offsets, int n_nodes, int dim,
               int window, int negatives, int epochs, double lr0, double lr_min,
               double[::1] noise_cdf, seed):
    """Skip-gram negative sampling; see _core_py.sgns_train."""
    cdef uint64_t state = <uint64_t>(int(seed) & ((1 << 64) - 1))
    w_in_arr = np.zeros(n_nodes * dim, dtype=np.float64)
    w_out_arr = np.zeros(n_nodes * dim, dtype=np.float64)
    cdef double[::1] w_in = w_in_arr
    cdef double[::1] w_out = w_out_arr
    cdef vector[double] acc = vector[double](dim, 0.0)
    cdef Py_ssize_t n_walks = offsets.shape[0] - 1
    cdef int64_t total_tokens = <int64_t>epochs * <int64_t>walks.shape[0]
    cdef int64_t processed = 0
    cdef Py_ssize_t ep, w, s, e, length, t, u
    cdef int k, dd, lo, hi, mid, lo2, hi2
    cdef int64_t center, ctx, target, cbase, obase
    cdef double lr, r, f, g, label
    with nogil:
        for dd in range(n_nodes * dim):
            w_in[dd] = ((_next_u64(&state) >> 11) * (2.0 ** -53) - 0.5) / dim
        for ep in range(epochs):
            for w in range(n_walks):
                s = offsets[w]
                e = offsets[w + 1]
                length = e - s
                for t in range(length):
                    lr = lr0 * (1.0 - <double>processed / <double>total_tokens)
                    if lr < lr_min:
                        lr = lr_min
                    processed += 1
                    center = walks[s + t]
                    cbase = center * dim
                    lo = <int>(t - window)
                    if lo < 0:
                        lo = 0
                    hi = <int>(t + window + 1)
                    if hi > <int>length:
                        hi = <int>length
                    for u in range(lo, hi):
                        if u == t:
                            continue
                        ctx = walks[s + u]
                        for dd in range(dim):
                            acc[dd] = 0.0
                        for k in range(negatives + 1):
                            if k == 0:
                                target = ctx
                                label = 1.0
                            else:
                                r = (_next_u64(&state) >> 11) * (2.0 ** -53)
                                lo2 = 0
                                hi2 = n_nodes
                                while lo2 < hi2:
                                    mid = (lo2 + hi2) // 2
                                    if noise_cdf[mid] > r:
                                        hi2 = mid
                                    else:
                                        lo2 = mid + 1
                                target = lo2 if lo2 < n_nodes else n_nodes - 1
                                label = 0.0
                            obase = target * dim
                            f = 0.0
                            for dd in range(dim):
                                f += w_in[cbase + dd] * w_out[obase + dd]
                            if f > 35.0:
                                f = 35.0
                            elif f < -35.0:
                                f = -35.0
                            g = (label - 1.0 / (1.0 + exp(-f))) * lr
                            for dd in range(dim):
                                acc[dd] += g * w_out[obase + dd]
                                w_out[obase + dd] += g * w_in[cbase + dd]
                        for dd in range(dim):
                            w_in[cbase + dd] += acc[dd]
    return w_in_arr.reshape(n_nodes, dim)
