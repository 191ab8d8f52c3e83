"""Exact dense linear algebra over a prime field F_p.

Matrices are numpy int64 arrays with entries in [0, p).  Everything
funnels through one elimination kernel (compiled or numpy fallback,
chosen in :mod:`squarecat._modp`); GF(2) work is bit-packed.  A small
sparse rank routine handles the occasional large boundary matrix.
"""

from __future__ import annotations

import numpy as np

from . import _modp

BACKEND = _modp.BACKEND

# Dense matrices bigger than this (rows*cols) are rejected to fail fast
# on runaway instances rather than thrash; desk-scale inputs stay far
# below it.
MAX_DENSE_ENTRIES = 400_000_000


class SizeBudgetError(RuntimeError):
    """Raised when a dense matrix exceeds the configured size bound."""


def as_mat(a, p):
    """Coerce to a C-contiguous int64 matrix reduced mod p."""
    m = np.ascontiguousarray(np.asarray(a, dtype=np.int64) % p)
    if m.ndim != 2:
        raise ValueError("expected a 2-d array")
    if m.size > MAX_DENSE_ENTRIES:
        raise SizeBudgetError(f"dense matrix of shape {m.shape} over budget")
    return m


def zeros(m, n):
    return np.zeros((m, n), dtype=np.int64)


def eye(n):
    return np.eye(n, dtype=np.int64)


def matmul(a, b, p):
    return (np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64)) % p


def _pack_f2(a):
    nw = max(1, (a.shape[1] + 63) >> 6)
    out = np.zeros((a.shape[0], nw), dtype=np.uint64)
    for w in range(nw):
        chunk = a[:, 64 * w : 64 * (w + 1)].astype(np.uint64)
        for b in range(chunk.shape[1]):
            out[:, w] |= chunk[:, b] << np.uint64(b)
    return out


def _unpack_f2(packed, ncols):
    out = np.zeros((packed.shape[0], ncols), dtype=np.int64)
    for c in range(ncols):
        out[:, c] = (packed[:, c >> 6] >> np.uint64(c & 63)).astype(np.int64) & 1
    return out


def rref(a, p):
    """Reduced row echelon form.  Returns (R, pivot_columns)."""
    a = as_mat(a, p).copy()
    if a.shape[0] == 0 or a.shape[1] == 0:
        return a, []
    if p == 2:
        packed = _pack_f2(a)
        pivots = _modp.rref_f2_inplace(packed, a.shape[1])
        return _unpack_f2(packed, a.shape[1]), list(pivots)
    pivots = _modp.rref_inplace(a, p)
    return a, list(pivots)


def rank(a, p):
    return len(rref(a, p)[1])


def kernel(a, p):
    """Columns spanning the right null space of ``a`` (shape n x k)."""
    a = as_mat(a, p)
    m, n = a.shape
    if n == 0:
        return zeros(0, 0)
    if m == 0:
        return eye(n)
    r, pivots = rref(a, p)
    free = [c for c in range(n) if c not in set(pivots)]
    out = zeros(n, len(free))
    for j, c in enumerate(free):
        out[c, j] = 1
        for i, pc in enumerate(pivots):
            out[pc, j] = (-int(r[i, c])) % p
    return out


def solve(a, b, p):
    """A particular solution X of a @ X = b, or None if inconsistent.

    ``b`` may be a matrix (solved column-wise) or a vector.
    """
    a = as_mat(a, p)
    vec = np.asarray(b).ndim == 1
    b = as_mat(b.reshape(-1, 1) if vec else b, p)
    m, n = a.shape
    if b.shape[0] != m:
        raise ValueError("shape mismatch in solve")
    aug = np.concatenate([a, b], axis=1) if n else b
    r, pivots = rref(aug, p)
    x = zeros(n, b.shape[1])
    for i, c in enumerate(pivots):
        if c >= n:
            return None
        x[c] = r[i, n:]
    # Rows beyond the pivot count are zero by construction of the RREF.
    return x[:, 0] if vec else x


def image_basis(a, p):
    """Columns of ``a`` forming a basis of its column space."""
    a = as_mat(a, p)
    _, pivots = rref(a, p)
    return a[:, pivots]


def quotient_map(basis, p, dim=None):
    """Surjection q: F^d -> F^(d-k) with kernel = colspace(basis).

    Returns (q, s) with q @ s = identity; ``s`` is a linear section, so
    a map F^d -> V descending to the quotient is computed as map @ s.
    """
    if dim is None:
        dim = basis.shape[0]
    basis = as_mat(basis, p) if basis.size else zeros(dim, 0)
    q = kernel(basis.T, p).T
    if q.shape[0] == 0:
        return zeros(0, dim), zeros(dim, 0)
    s = solve(q, eye(q.shape[0]), p)
    assert s is not None
    return q, s


def intersect(a, b, p):
    """Columns spanning colspace(a) ∩ colspace(b)."""
    if a.shape[1] == 0 or b.shape[1] == 0:
        return zeros(a.shape[0], 0)
    k = kernel(np.concatenate([a, -b % p], axis=1), p)
    return matmul(a, k[: a.shape[1]], p)


def sparse_rank(rows, p):
    """Rank of a sparse matrix given as dicts {column: coefficient}.

    Plain elimination with first-seen pivots; adequate for the large,
    very sparse boundary matrices of nerves.
    """
    pivot_rows: dict[int, dict[int, int]] = {}
    for row in rows:
        row = {c: v % p for c, v in row.items() if v % p}
        while row:
            c = min(row)
            piv = pivot_rows.get(c)
            if piv is None:
                inv = pow(row[c], p - 2, p)
                if inv != 1:
                    row = {k: (v * inv) % p for k, v in row.items()}
                pivot_rows[c] = row
                break
            f = row[c]
            for k, v in piv.items():
                nv = (row.get(k, 0) - f * v) % p
                if nv:
                    row[k] = nv
                elif k in row:
                    del row[k]
    return len(pivot_rows)
