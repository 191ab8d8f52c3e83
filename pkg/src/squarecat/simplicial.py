"""Finite truncated simplicial sets, presented levelwise.

All simplices up to the cap are materialized with explicit face and
degeneracy tables; nondegenerate simplices and normalized-chain
homology are derived.  Large, very sparse boundary matrices switch to
the sparse rank routine automatically.
"""

from __future__ import annotations

from . import linalg as la

SPARSE_CUTOFF = 2_000_000


class SimplicialError(ValueError):
    pass


class SimplicialSet:
    def __init__(self, levels, faces, degens, check=True):
        """levels[k]: list of simplex ids; faces[(k, j)][x] / degens[(k, j)][x]."""
        self.cap = len(levels) - 1
        self.levels = [list(l) for l in levels]
        self.faces = faces
        self.degens = degens
        self._nondeg = None
        if check:
            self.validate()

    def face(self, k, j, x):
        return self.faces[(k, j)][x]

    def degen(self, k, j, x):
        return self.degens[(k, j)][x]

    def count(self, k):
        return len(self.levels[k]) if 0 <= k <= self.cap else 0

    def _degenerate_sets(self):
        if self._nondeg is None:
            self._nondeg = []
            for k in range(self.cap + 1):
                if k == 0:
                    self._nondeg.append(list(self.levels[0]))
                    continue
                degenerate = set()
                for j in range(k):
                    degenerate.update(self.degens[(k - 1, j)].values())
                self._nondeg.append(
                    [x for x in self.levels[k] if x not in degenerate]
                )
        return self._nondeg

    def nondegenerate(self, k):
        if not 0 <= k <= self.cap:
            return []
        return self._degenerate_sets()[k]

    def nondeg_counts(self):
        counts = [len(self.nondegenerate(k)) for k in range(self.cap + 1)]
        while counts and counts[-1] == 0:
            counts.pop()
        return tuple(counts)

    def validate(self):
        for k in range(1, self.cap + 1):
            for j in range(k + 1):
                if set(self.faces[(k, j)]) != set(self.levels[k]):
                    raise SimplicialError(f"face table ({k},{j}) incomplete")
        for k in range(self.cap):
            for j in range(k + 1):
                if set(self.degens[(k, j)]) != set(self.levels[k]):
                    raise SimplicialError(f"degeneracy table ({k},{j}) incomplete")
        # Simplicial identities on every simplex they are defined for.
        for k in range(2, self.cap + 1):
            for x in self.levels[k]:
                for j in range(k + 1):
                    for i in range(j):
                        a = self.face(k - 1, i, self.face(k, j, x))
                        b = self.face(k - 1, j - 1, self.face(k, i, x))
                        if a != b:
                            raise SimplicialError("face identity fails")
        for k in range(1, self.cap + 1):
            for x in self.levels[k - 1]:
                for j in range(k):
                    sx = self.degen(k - 1, j, x)
                    if self.face(k, j, sx) != x or self.face(k, j + 1, sx) != x:
                        raise SimplicialError("face-degeneracy identity fails")

    def boundary_columns(self, k, p):
        """Normalized boundary: columns over nondegenerate k-simplices."""
        nd_prev = {x: i for i, x in enumerate(self.nondegenerate(k - 1))}
        cols = []
        for x in self.nondegenerate(k):
            col: dict[int, int] = {}
            for j in range(k + 1):
                y = self.face(k, j, x)
                i = nd_prev.get(y)
                if i is not None:
                    col[i] = (col.get(i, 0) + (-1) ** j) % p
            cols.append({i: v for i, v in col.items() if v})
        return cols, len(nd_prev)

    def boundary_rank(self, k, p):
        if k <= 0 or k > self.cap:
            return 0
        cols, nrows = self.boundary_columns(k, p)
        if not cols or nrows == 0:
            return 0
        if len(cols) * nrows > SPARSE_CUTOFF:
            return la.sparse_rank(cols, p)
        m = la.zeros(nrows, len(cols))
        for c, col in enumerate(cols):
            for r, v in col.items():
                m[r, c] = v
        return la.rank(m, p)

    def homology(self, p, degrees=None):
        """Normalized-chain homology dims; degree k needs k+1 <= cap."""
        if degrees is None:
            degrees = range(self.cap)
        out = {}
        for k in degrees:
            if k + 1 > self.cap:
                raise SimplicialError(f"degree {k} exceeds the cap {self.cap}")
            z = len(self.nondegenerate(k)) - self.boundary_rank(k, p)
            out[k] = z - self.boundary_rank(k + 1, p)
        return out


class SimplicialMap:
    def __init__(self, src, dst, assign, check=True):
        """assign[k]: dict simplex -> simplex, for 0 <= k <= min cap."""
        self.src = src
        self.dst = dst
        self.assign = assign
        if check:
            self.validate()

    def __call__(self, k, x):
        return self.assign[k][x]

    def validate(self):
        cap = min(self.src.cap, self.dst.cap)
        for k in range(cap + 1):
            if set(self.assign[k]) != set(self.src.levels[k]):
                raise SimplicialError(f"assignment at level {k} incomplete")
        for k in range(1, cap + 1):
            for x in self.src.levels[k]:
                for j in range(k + 1):
                    if self(k - 1, self.src.face(k, j, x)) != self.dst.face(
                        k, j, self(k, x)
                    ):
                        raise SimplicialError("map does not commute with faces")
        for k in range(cap):
            for x in self.src.levels[k]:
                for j in range(k + 1):
                    if self(k + 1, self.src.degen(k, j, x)) != self.dst.degen(
                        k, j, self(k, x)
                    ):
                        raise SimplicialError("map does not commute with degeneracies")
