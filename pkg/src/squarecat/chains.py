"""Bounded chain complexes of finite-dimensional F_p vector spaces.

Exact matrices throughout; the model-structure predicates (quasi-iso,
fibration = degreewise surjection, cofibration = degreewise injection)
are rank computations.  Over a field the projective-cokernel condition
for cofibrations is automatic, which the verdict metadata records.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg as la


class ChainError(ValueError):
    pass


class ChainComplex:
    """Nonnegative-free grading: any finite window of degrees is allowed."""

    def __init__(self, p, dims, diffs=None, check=True):
        self.p = p
        self.dims = {n: int(d) for n, d in dims.items() if d}
        self.diffs = {}
        diffs = diffs or {}
        for n, m in diffs.items():
            m = la.as_mat(m, p)
            if m.shape != (self.dim(n - 1), self.dim(n)):
                raise ChainError(f"differential at degree {n} has shape {m.shape}")
            if m.any():
                self.diffs[n] = m
        if check:
            self.validate()

    def dim(self, n):
        return self.dims.get(n, 0)

    @property
    def lo(self):
        return min(self.dims) if self.dims else 0

    @property
    def hi(self):
        return max(self.dims) if self.dims else 0

    def degrees(self):
        return sorted(self.dims)

    def d(self, n):
        m = self.diffs.get(n)
        if m is None:
            return la.zeros(self.dim(n - 1), self.dim(n))
        return m

    def total_dim(self):
        return sum(self.dims.values())

    def validate(self):
        for n in list(self.diffs):
            if la.matmul(self.d(n), self.d(n + 1), self.p).any():
                raise ChainError(f"d∘d != 0 at degree {n + 1}")

    def key(self):
        parts = [self.p]
        for n in self.degrees():
            parts.append((n, self.dim(n), self.d(n).tobytes()))
        return tuple(parts)

    def __repr__(self):
        spans = ",".join(f"{n}:{d}" for n, d in sorted(self.dims.items()))
        return f"ChainComplex(p={self.p}, {{{spans}}})"


@dataclass
class ChainMap:
    src: ChainComplex
    dst: ChainComplex
    comps: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for n, m in self.comps.items():
            m = la.as_mat(m, self.src.p)
            if m.shape != (self.dst.dim(n), self.src.dim(n)):
                raise ChainError(f"component at degree {n} has shape {m.shape}")
            if m.any():
                clean[n] = m
        self.comps = clean

    @property
    def p(self):
        return self.src.p

    def comp(self, n):
        m = self.comps.get(n)
        if m is None:
            return la.zeros(self.dst.dim(n), self.src.dim(n))
        return m

    def validate(self):
        for n in set(self.src.dims) | set(self.dst.dims):
            lhs = la.matmul(self.dst.d(n), self.comp(n), self.p)
            rhs = la.matmul(self.comp(n - 1), self.src.d(n), self.p)
            if (lhs != rhs).any():
                raise ChainError(f"does not commute with d at degree {n}")
        return self

    def __eq__(self, other):
        if not isinstance(other, ChainMap):
            return NotImplemented
        degs = set(self.src.dims) | set(other.src.dims)
        return (
            self.src.dims == other.src.dims
            and self.dst.dims == other.dst.dims
            and all((self.comp(n) == other.comp(n)).all() for n in degs)
        )


def zero_complex(p):
    return ChainComplex(p, {})


def unit_complex(p):
    """The monoidal unit F concentrated in degree 0."""
    return ChainComplex(p, {0: 1})


def sphere(p, n):
    return ChainComplex(p, {n: 1})


def disk(p, n):
    """Dims 1 in degrees n and n-1, identity differential; acyclic."""
    return ChainComplex(p, {n: 1, n - 1: 1}, {n: [[1]]})


def interval(p):
    """The cellular interval J: two vertices, one edge, d(edge) = v1 - v0."""
    return ChainComplex(p, {0: 2, 1: 1}, {1: [[-1], [1]]})


def identity_map(x):
    return ChainMap(x, x, {n: la.eye(x.dim(n)) for n in x.degrees()})


def zero_map(x, y):
    return ChainMap(x, y, {})


def compose_maps(g, f):
    if f.dst.dims != g.src.dims:
        raise ChainError("composition mismatch")
    return ChainMap(
        f.src,
        g.dst,
        {n: la.matmul(g.comp(n), f.comp(n), f.p) for n in f.src.degrees()},
    )


def add_maps(f, g):
    return ChainMap(
        f.src, f.dst, {n: (f.comp(n) + g.comp(n)) % f.p for n in f.src.degrees()}
    )


def scale_map(c, f):
    return ChainMap(f.src, f.dst, {n: (c * f.comp(n)) % f.p for n in f.src.degrees()})


def direct_sum(xs):
    p = xs[0].p
    degs = sorted({n for x in xs for n in x.dims})
    dims = {n: sum(x.dim(n) for x in xs) for n in degs}
    diffs = {}
    for n in degs:
        blocks = [x.d(n) for x in xs]
        diffs[n] = _blockdiag(blocks)
    out = ChainComplex(p, dims, diffs, check=False)
    incs, projs = [], []
    for i, x in enumerate(xs):
        inc, proj = {}, {}
        for n in x.degrees():
            off = sum(y.dim(n) for y in xs[:i])
            m = la.zeros(out.dim(n), x.dim(n))
            m[off : off + x.dim(n)] = la.eye(x.dim(n))
            inc[n] = m
            proj[n] = m.T
        incs.append(ChainMap(x, out, inc))
        projs.append(ChainMap(out, x, proj))
    return out, incs, projs


def _blockdiag(blocks):
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = la.zeros(rows, cols)
    r = c = 0
    for b in blocks:
        out[r : r + b.shape[0], c : c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out


# -- tensor product ----------------------------------------------------

def tensor_blocks(x, y, n):
    """Block layout of (x ⊗ y)_n: list of (i, offset, dim x_i, dim y_(n-i))."""
    out = []
    off = 0
    for i in x.degrees():
        dx, dy = x.dim(i), y.dim(n - i)
        if dx and dy:
            out.append((i, off, dx, dy))
            off += dx * dy
    return out


def tensor(x, y):
    """x ⊗ y with Koszul signs: d(a⊗b) = da⊗b + (-1)^|a| a⊗db."""
    p = x.p
    if y.p != p:
        raise ChainError("field mismatch")
    degs = sorted({i + j for i in x.dims for j in y.dims})
    dims = {n: sum(dx * dy for _, _, dx, dy in tensor_blocks(x, y, n)) for n in degs}
    diffs = {}
    for n in degs:
        src_blocks = tensor_blocks(x, y, n)
        tgt_blocks = {i: off for i, off, _, _ in tensor_blocks(x, y, n - 1)}
        m = la.zeros(dims.get(n - 1, 0), dims[n])
        for i, off, dx, dy in src_blocks:
            dxm, dym = x.d(i), y.d(n - i)
            sgn = 1 if i % 2 == 0 else p - 1
            for a in range(dx):
                for b in range(dy):
                    col = off + a * dy + b
                    if i - 1 in tgt_blocks and x.dim(i - 1):
                        t = tgt_blocks[i - 1]
                        dy1 = y.dim(n - i)
                        m[t + np.arange(x.dim(i - 1)) * dy1 + b, col] += dxm[:, a]
                    if i in tgt_blocks and y.dim(n - 1 - i):
                        t = tgt_blocks[i]
                        dy2 = y.dim(n - 1 - i)
                        m[t + a * dy2 + np.arange(dy2), col] += sgn * dym[:, b]
        diffs[n] = m % p
    return ChainComplex(p, dims, diffs, check=False)


def tensor_map(f, g):
    """f ⊗ g for degree-0 chain maps (no Koszul signs arise)."""
    x, y = tensor(f.src, g.src), tensor(f.dst, g.dst)
    comps = {}
    for n in x.degrees():
        m = la.zeros(y.dim(n), x.dim(n))
        tgt = {i: off for i, off, _, _ in tensor_blocks(f.dst, g.dst, n)}
        for i, off, dx, dy in tensor_blocks(f.src, g.src, n):
            fi, gi = f.comp(i), g.comp(n - i)
            if i not in tgt:
                continue
            toff = tgt[i]
            dyt = g.dst.dim(n - i)
            for a in range(dx):
                for b in range(dy):
                    col = off + a * dy + b
                    block = np.outer(fi[:, a], gi[:, b]).reshape(-1)
                    m[toff : toff + fi.shape[0] * dyt, col] += block
        comps[n] = m % f.p
    return ChainMap(x, y, comps)


# -- internal hom ------------------------------------------------------

def hom_blocks(x, y, n):
    """Block layout of [x, y]_n: list of (i, offset, dim y_(i+n), dim x_i).

    Block (i) is Hom(x_i, y_(i+n)) flattened row-major: index = b * dx + a.
    """
    out = []
    off = 0
    for i in x.degrees():
        dx, dy = x.dim(i), y.dim(i + n)
        if dx and dy:
            out.append((i, off, dy, dx))
            off += dx * dy
    return out


def internal_hom(x, y):
    """[x, y] with differential (∂f)_i = d∘f_i - (-1)^|f| f_(i-1)∘d."""
    p = x.p
    if y.p != p:
        raise ChainError("field mismatch")
    degs = sorted({j - i for i in x.dims for j in y.dims})
    dims = {n: sum(dy * dx for _, _, dy, dx in hom_blocks(x, y, n)) for n in degs}
    dims = {n: d for n, d in dims.items() if d}
    diffs = {}
    for n in dims:
        if n - 1 not in dims:
            continue
        m = la.zeros(dims[n - 1], dims[n])
        tgt = {i: off for i, off, _, _ in hom_blocks(x, y, n - 1)}
        sgn = 1 if n % 2 == 0 else -1
        for i, off, dy, dx in hom_blocks(x, y, n):
            # d_Y ∘ f_i lands in target block i.
            dym = y.d(i + n)
            if i in tgt and y.dim(i + n - 1):
                toff = tgt[i]
                for b in range(dy):
                    for a in range(dx):
                        col = off + b * dx + a
                        m[toff + np.arange(y.dim(i + n - 1)) * dx + a, col] += dym[:, b]
            # -(-1)^n f_i ∘ d_X lands in target block i+1.
            dxm = x.d(i + 1)
            if i + 1 in tgt and x.dim(i + 1):
                toff = tgt[i + 1]
                for b in range(dy):
                    for a in range(dx):
                        col = off + b * dx + a
                        m[toff + b * x.dim(i + 1) + np.arange(x.dim(i + 1)), col] += (
                            -sgn
                        ) * dxm[a, :]
        diffs[n] = m % p
    return ChainComplex(p, dims, diffs, check=False)


def hom_flatten(x, y, n, comps):
    """Flatten {i: matrix x_i -> y_(i+n)} into [x,y]_n coordinates."""
    blocks = hom_blocks(x, y, n)
    total = sum(dy * dx for _, _, dy, dx in blocks)
    v = np.zeros(total, dtype=np.int64)
    for i, off, dy, dx in blocks:
        m = comps.get(i)
        if m is not None:
            v[off : off + dy * dx] = (np.asarray(m, dtype=np.int64) % x.p).reshape(-1)
    return v


def hom_unflatten(x, y, n, v):
    """Inverse of :func:`hom_flatten`; returns {i: matrix}."""
    out = {}
    for i, off, dy, dx in hom_blocks(x, y, n):
        out[i] = np.asarray(v[off : off + dy * dx], dtype=np.int64).reshape(dy, dx)
    return out


def chain_maps_basis(x, y):
    """Columns spanning the space of chain maps x -> y, in [x,y]_0 coords."""
    h = internal_hom(x, y)
    return la.kernel(h.d(0), x.p)


def map_from_flat(x, y, v):
    return ChainMap(x, y, hom_unflatten(x, y, 0, v))


def null_homotopic_basis(x, y):
    """Columns spanning {dh + hd} inside [x,y]_0: the image of ∂_1."""
    h = internal_hom(x, y)
    return la.image_basis(h.d(1), x.p)


# -- homology ----------------------------------------------------------

def homology(x):
    """Dims of H_n per degree (zeros omitted only if degree unsupported)."""
    out = {}
    for n in x.degrees():
        z = x.dim(n) - la.rank(x.d(n), x.p)
        b = la.rank(x.d(n + 1), x.p)
        out[n] = z - b
    return out


class HomologyBasis:
    """Cycle basis plus quotient data for one degree."""

    def __init__(self, x, n):
        p = x.p
        self.p = p
        self.cycles = la.kernel(x.d(n), p)
        bnd = la.image_basis(x.d(n + 1), p)
        in_z = la.solve(self.cycles, bnd, p)
        assert in_z is not None, "boundaries are cycles"
        self.q, self.s = la.quotient_map(in_z, p, self.cycles.shape[1])

    @property
    def dim(self):
        return self.q.shape[0]

    def coords(self, vectors):
        """Homology coordinates of cycle columns."""
        c = la.solve(self.cycles, vectors, self.p)
        assert c is not None, "input vectors must be cycles"
        return la.matmul(self.q, c, self.p)

    def reps(self):
        """Cycle representatives of a homology basis, as columns."""
        return la.matmul(self.cycles, self.s, self.p)


def induced_homology_map(f, n, hs=None, ht=None):
    hs = hs or HomologyBasis(f.src, n)
    ht = ht or HomologyBasis(f.dst, n)
    pushed = la.matmul(f.comp(n), hs.reps(), f.p)
    return ht.coords(pushed)


def is_quasi_iso(f, degrees=None):
    """True iff H_n(f) is an isomorphism for every n (or each n given)."""
    if degrees is None:
        degrees = sorted(set(f.src.dims) | set(f.dst.dims))
    for n in degrees:
        hs, ht = HomologyBasis(f.src, n), HomologyBasis(f.dst, n)
        if hs.dim != ht.dim:
            return False
        m = induced_homology_map(f, n, hs, ht)
        if la.rank(m, f.p) != hs.dim:
            return False
    return True


def is_fibration(f):
    """Degreewise surjection, by rank."""
    return all(
        la.rank(f.comp(n), f.p) == f.dst.dim(n) for n in f.dst.degrees()
    )


def is_cofibration(f):
    """Degreewise injection; over a field the cokernel is automatically
    projective, so this is the whole condition."""
    return all(
        la.rank(f.comp(n), f.p) == f.src.dim(n) for n in f.src.degrees()
    )


def cone(f):
    """Mapping cone: C_n = x_(n-1) ⊕ y_n, d(a, b) = (-da, f a + db)."""
    x, y, p = f.src, f.dst, f.p
    degs = sorted({n + 1 for n in x.dims} | set(y.dims))
    dims = {n: x.dim(n - 1) + y.dim(n) for n in degs}
    diffs = {}
    for n in degs:
        m = la.zeros(dims.get(n - 1, 0), dims[n])
        dx1 = x.dim(n - 1)
        top = x.dim(n - 2)
        m[:top, :dx1] = (-x.d(n - 1)) % p
        m[top : top + y.dim(n - 1), :dx1] = f.comp(n - 1)
        m[top : top + y.dim(n - 1), dx1:] = y.d(n)
        diffs[n] = m
    return ChainComplex(p, dims, diffs, check=False)


# -- (co)limits --------------------------------------------------------

class Pushout:
    """Pushout of x <-f- a -g-> y with structure maps and induced maps."""

    def __init__(self, f, g):
        if f.src.dims != g.src.dims:
            raise ChainError("pushout legs must share their source")
        a, x, y, p = f.src, f.dst, g.dst, f.p
        degs = sorted(set(x.dims) | set(y.dims) | set(a.dims))
        self.q, self.s = {}, {}
        dims, diffs = {}, {}
        for n in degs:
            rel = np.concatenate([f.comp(n), (-g.comp(n)) % p], axis=0)
            q, s = la.quotient_map(rel, p, x.dim(n) + y.dim(n))
            self.q[n], self.s[n] = q, s
            dims[n] = q.shape[0]
        for n in degs:
            if n - 1 not in dims:
                continue
            dd = _stack_sum_d(x, y, n)
            diffs[n] = la.matmul(self.q[n - 1], la.matmul(dd, self.s[n], p), p)
        self.complex = ChainComplex(p, dims, diffs, check=False)
        self.inl = ChainMap(
            x, self.complex, {n: self.q[n][:, : x.dim(n)] for n in degs}
        )
        self.inr = ChainMap(
            y, self.complex, {n: self.q[n][:, x.dim(n) :] for n in degs}
        )

    def induced(self, u, v):
        """The map out of the pushout determined by u, v with u∘f = v∘g."""
        t = u.dst
        comps = {}
        for n, s in self.s.items():
            both = np.concatenate([u.comp(n), v.comp(n)], axis=1)
            comps[n] = la.matmul(both, s, u.p)
        return ChainMap(self.complex, t, comps)


def _stack_sum_d(x, y, n):
    """Differential of x ⊕ y at degree n in stacked (x above y) coords."""
    top = np.concatenate(
        [x.d(n), la.zeros(x.dim(n - 1), y.dim(n))], axis=1
    )
    bot = np.concatenate(
        [la.zeros(y.dim(n - 1), x.dim(n)), y.d(n)], axis=1
    )
    return np.concatenate([top, bot], axis=0)


class Pullback:
    """Pullback of x -f-> b <-g- y with projections and induced maps."""

    def __init__(self, f, g):
        if f.dst.dims != g.dst.dims:
            raise ChainError("pullback legs must share their target")
        x, y, p = f.src, g.src, f.p
        degs = sorted(set(x.dims) | set(y.dims))
        self.basis = {}
        dims, diffs = {}, {}
        for n in degs:
            m = np.concatenate([f.comp(n), (-g.comp(n)) % p], axis=1)
            self.basis[n] = la.kernel(m, p)
            dims[n] = self.basis[n].shape[1]
        for n in degs:
            if n - 1 not in dims or not dims[n]:
                continue
            pushed = la.matmul(_stack_sum_d(x, y, n), self.basis[n], p)
            coords = la.solve(self.basis.get(n - 1, la.zeros(pushed.shape[0], 0)), pushed, p)
            assert coords is not None, "pullback differential must descend"
            diffs[n] = coords
        self.complex = ChainComplex(p, dims, diffs, check=False)
        self.prl = ChainMap(
            self.complex, x, {n: self.basis[n][: x.dim(n), :] for n in degs}
        )
        self.prr = ChainMap(
            self.complex, y, {n: self.basis[n][x.dim(n) :, :] for n in degs}
        )

    def induced(self, u, v):
        """The map into the pullback determined by u, v with f∘u = g∘v."""
        comps = {}
        for n, b in self.basis.items():
            stacked = np.concatenate([u.comp(n), v.comp(n)], axis=0)
            c = la.solve(b, stacked, u.p)
            assert c is not None, "induced map must factor through the pullback"
            comps[n] = c
        return ChainMap(u.src, self.complex, comps)


def quotient_complex(x, sub_cols):
    """Quotient of x by the subcomplex spanned by the given columns.

    ``sub_cols`` maps degree -> matrix of spanning columns (must be
    d-stable).  Returns (quotient, q per degree, s per degree).
    """
    p = x.p
    qs, ss, dims = {}, {}, {}
    for n in x.degrees():
        cols = sub_cols.get(n)
        cols = la.zeros(x.dim(n), 0) if cols is None else la.as_mat(cols, p)
        q, s = la.quotient_map(cols, p, x.dim(n))
        qs[n], ss[n] = q, s
        dims[n] = q.shape[0]
    diffs = {}
    for n in x.degrees():
        if n - 1 in dims:
            diffs[n] = la.matmul(qs[n - 1], la.matmul(x.d(n), ss[n], p), p)
    return ChainComplex(p, dims, diffs, check=False), qs, ss


# -- seeded batteries --------------------------------------------------

def random_complex(rng, p, lo=0, hi=3, max_dim=4):
    """Seeded random bounded complex: dims then differentials with d² = 0."""
    dims = {n: int(rng.integers(1, max_dim + 1)) for n in range(lo, hi + 1)}
    diffs = {}
    prev_kernel = None
    for n in range(lo + 1, hi + 1):
        rows, cols = dims[n - 1], dims[n]
        if prev_kernel is None:
            d = rng.integers(0, p, size=(rows, cols))
        else:
            coeff = rng.integers(0, p, size=(prev_kernel.shape[1], cols))
            d = la.matmul(prev_kernel, coeff, p)
        diffs[n] = d % p
        prev_kernel = la.kernel(diffs[n], p)
    return ChainComplex(p, dims, diffs)


def random_chain_map(rng, x, y):
    """Seeded random chain map x -> y (possibly zero)."""
    basis = chain_maps_basis(x, y)
    if basis.shape[1] == 0:
        return zero_map(x, y)
    coeff = rng.integers(0, x.p, size=basis.shape[1])
    return map_from_flat(x, y, la.matmul(basis, coeff.reshape(-1, 1), x.p)[:, 0])
