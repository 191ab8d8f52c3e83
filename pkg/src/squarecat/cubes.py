"""Exact calculus for the category of cubes.

A morphism [m] -> [n] between cube posets {0,1}^m -> {0,1}^n built from
cofaces and codegeneracies is stored in normal form: one entry per
output coordinate, either a constant ("0" or "1") or a 1-based input
variable index.  Each variable occurs at most once and variable indices
increase left to right; this makes equality decidable and composition a
single substitution pass.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb


@dataclass(frozen=True)
class CubeMor:
    """Normal-form cube morphism [src] -> [dst]."""

    src: int
    dst: int
    entries: tuple

    def __post_init__(self):
        if self.src < 0 or self.dst < 0 or len(self.entries) != self.dst:
            raise ValueError("malformed cube morphism")
        seen = 0
        for e in self.entries:
            if isinstance(e, bool) or not (
                e in ("0", "1") or (isinstance(e, int) and 1 <= e <= self.src)
            ):
                raise ValueError(f"bad entry {e!r}")
            if isinstance(e, int):
                if e <= seen:
                    raise ValueError("variables must be distinct and increasing")
                seen = e

    def variables(self):
        return tuple(e for e in self.entries if isinstance(e, int))

    def is_identity(self):
        return self.src == self.dst and self.entries == tuple(range(1, self.src + 1))

    def is_epi(self):
        """True iff a composite of codegeneracies (no constant entries)."""
        return all(isinstance(e, int) for e in self.entries)

    def is_mono(self):
        """True iff a composite of cofaces (every variable used)."""
        return len(self.variables()) == self.src

    def __repr__(self):
        body = ",".join(f"x{e}" if isinstance(e, int) else e for e in self.entries)
        return f"[{self.src}->{self.dst}:{body}]"


def identity(n):
    return CubeMor(n, n, tuple(range(1, n + 1)))


def coface(n, k, i):
    """The map [n] -> [n+1] inserting the constant i at coordinate k."""
    if not 0 <= k <= n:
        raise ValueError(f"coface position {k} out of range for dimension {n}")
    if i not in (0, 1):
        raise ValueError("coface end must be 0 or 1")
    entries = tuple(range(1, k + 1)) + (str(i),) + tuple(range(k + 1, n + 1))
    return CubeMor(n, n + 1, entries)


def codegeneracy(n, k):
    """The map [n+1] -> [n] dropping input coordinate k."""
    if not 0 <= k <= n:
        raise ValueError(f"codegeneracy position {k} out of range for dimension {n}")
    entries = tuple(range(1, k + 1)) + tuple(range(k + 2, n + 2))
    return CubeMor(n + 1, n, entries)


def compose(g, f):
    """g after f.  Substitution keeps the normal form."""
    if f.dst != g.src:
        raise ValueError(f"cannot compose {g!r} after {f!r}")
    entries = tuple(
        f.entries[e - 1] if isinstance(e, int) else e for e in g.entries
    )
    return CubeMor(f.src, g.dst, entries)


def tensor(f, g):
    """Product of cubes: entries of f followed by shifted entries of g."""
    shifted = tuple(e + f.src if isinstance(e, int) else e for e in g.entries)
    return CubeMor(f.src + g.src, f.dst + g.dst, f.entries + shifted)


def evaluate(f, vertex):
    """Apply f to a vertex of {0,1}^src."""
    assert len(vertex) == f.src
    return tuple(
        vertex[e - 1] if isinstance(e, int) else int(e) for e in f.entries
    )


def enumerate_hom(m, n):
    """All morphisms [m] -> [n], each in normal form, no duplicates."""
    out = []
    for k in range(min(m, n) + 1):
        for slots in itertools.combinations(range(n), k):
            for variables in itertools.combinations(range(1, m + 1), k):
                const_slots = [t for t in range(n) if t not in slots]
                for consts in itertools.product("01", repeat=n - k):
                    entries = [None] * n
                    for t, v in zip(slots, variables):
                        entries[t] = v
                    for t, c in zip(const_slots, consts):
                        entries[t] = c
                    out.append(CubeMor(m, n, tuple(entries)))
    return out


def hom_count(m, n):
    """Closed formula for |hom([m],[n])|."""
    return sum(comb(n, k) * comb(m, k) * 2 ** (n - k) for k in range(min(m, n) + 1))


def ez_factor(f):
    """Unique factorisation f = mono ∘ epi through the used variables.

    The epi drops exactly the variables f never uses; the mono is f with
    variables renumbered consecutively.
    """
    used = f.variables()
    renumber = {v: j + 1 for j, v in enumerate(used)}
    epi = CubeMor(f.src, len(used), used)
    mono = CubeMor(
        len(used),
        f.dst,
        tuple(renumber[e] if isinstance(e, int) else e for e in f.entries),
    )
    return epi, mono
