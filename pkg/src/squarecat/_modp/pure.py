"""Numpy fallback for the dense mod-p elimination kernels.

Same contract as the compiled ``_kernels`` module: matrices are
C-contiguous int64 arrays with entries already reduced into [0, p), and
GF(2) matrices arrive bit-packed into uint64 words, 64 columns per word.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def rref_inplace(a, p):
    """Reduce ``a`` to reduced row echelon form mod p, in place.

    Returns the list of pivot column indices; row i of the result is the
    i-th nonzero row of the RREF.
    """
    m, n = a.shape
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        if inv != 1:
            a[r] = (a[r] * inv) % p
        rows = np.nonzero(a[:, c])[0]
        rows = rows[rows != r]
        if rows.size:
            a[rows] = (a[rows] - np.outer(a[rows, c], a[r])) % p
        pivots.append(c)
        r += 1
    return pivots


def rref_f2_inplace(a, ncols):
    """RREF of a bit-packed GF(2) matrix, in place.

    ``a`` has shape (m, ceil(ncols/64)); column c lives in word c >> 6,
    bit c & 63.  Returns the pivot column list.
    """
    m = a.shape[0]
    pivots = []
    r = 0
    for c in range(ncols):
        if r == m:
            break
        w, b = c >> 6, c & 63
        bits = (a[r:, w] >> np.uint64(b)) & np.uint64(1)
        nz = np.nonzero(bits)[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        col = (a[:, w] >> np.uint64(b)) & np.uint64(1)
        rows = np.nonzero(col)[0]
        rows = rows[rows != r]
        if rows.size:
            a[rows] ^= a[r]
        pivots.append(c)
        r += 1
    return pivots
