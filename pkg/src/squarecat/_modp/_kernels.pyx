# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled dense mod-p elimination kernels.

Same contract as ``squarecat._modp.pure``; see there for the data
layout.  Entries must already be reduced into [0, p).
"""

import numpy as np

BACKEND = "cython"

ctypedef long long i64
ctypedef unsigned long long u64


cdef inline i64 _inv_mod(i64 x, i64 p):
    # Fermat: x^(p-2) mod p.
    cdef i64 r = 1
    cdef i64 b = x % p
    cdef i64 e = p - 2
    while e > 0:
        if e & 1:
            r = (r * b) % p
        b = (b * b) % p
        e >>= 1
    return r


def rref_inplace(i64[:, ::1] a, i64 p):
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t n = a.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, k
    cdef i64 inv, f, tmp
    pivots = []
    for c in range(n):
        if r == m:
            break
        k = -1
        for i in range(r, m):
            if a[i, c] != 0:
                k = i
                break
        if k < 0:
            continue
        if k != r:
            for j in range(n):
                tmp = a[r, j]
                a[r, j] = a[k, j]
                a[k, j] = tmp
        inv = _inv_mod(a[r, c], p)
        if inv != 1:
            for j in range(c, n):
                a[r, j] = (a[r, j] * inv) % p
        for i in range(m):
            if i != r and a[i, c] != 0:
                f = a[i, c]
                for j in range(c, n):
                    tmp = (a[i, j] - f * a[r, j]) % p
                    if tmp < 0:
                        tmp += p
                    a[i, j] = tmp
        pivots.append(c)
        r += 1
    return pivots


def rref_f2_inplace(u64[:, ::1] a, Py_ssize_t ncols):
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t nw = a.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, k, w
    cdef int b
    cdef u64 tmp
    pivots = []
    for c in range(ncols):
        if r == m:
            break
        w = c >> 6
        b = c & 63
        k = -1
        for i in range(r, m):
            if (a[i, w] >> b) & 1:
                k = i
                break
        if k < 0:
            continue
        if k != r:
            for j in range(nw):
                tmp = a[r, j]
                a[r, j] = a[k, j]
                a[k, j] = tmp
        for i in range(m):
            if i != r and ((a[i, w] >> b) & 1):
                for j in range(nw):
                    a[i, j] ^= a[r, j]
        pivots.append(c)
        r += 1
    return pivots
