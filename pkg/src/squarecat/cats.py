"""Finite categories, nerves, Grothendieck constructions, twisted
arrows and homotopy colimits of diagrams of simplicial or cubical sets.

Homotopy colimits use the diagonal of the levelwise-coproduct
bisimplicial set, which is finite in each level and weakly equivalent
to the geometric realisation; all downstream comparisons are
homology-level, so that is enough.
"""

from __future__ import annotations

import itertools

from .simplicial import SimplicialMap, SimplicialSet


class CategoryError(ValueError):
    pass


class FiniteCategory:
    def __init__(self, objects, morphisms, identities, table=None, composer=None):
        """morphisms: mid -> (src, dst); composition from an explicit
        table or a composer callable (g, f) -> mid."""
        self.objects = list(objects)
        self.morphisms = dict(morphisms)
        self.identities = dict(identities)
        if table is None and composer is None:
            raise CategoryError("need a composition table or composer")
        self._table = dict(table) if table else {}
        self._composer = composer

    def src(self, mid):
        return self.morphisms[mid][0]

    def dst(self, mid):
        return self.morphisms[mid][1]

    def is_identity(self, mid):
        return self.identities.get(self.src(mid)) == mid

    def compose(self, g, f):
        """g after f."""
        if self.dst(f) != self.src(g):
            raise CategoryError("morphisms are not composable")
        key = (g, f)
        out = self._table.get(key)
        if out is None:
            out = self._composer(g, f)
            if out not in self.morphisms:
                raise CategoryError("composer produced an unknown morphism")
            self._table[key] = out
        return out

    def homset(self, x, y):
        return [m for m, (s, d) in self.morphisms.items() if s == x and d == y]

    def out_morphisms(self, x):
        return [m for m, (s, _) in self.morphisms.items() if s == x]

    def composable_pairs(self):
        by_src = {}
        for m, (s, _) in self.morphisms.items():
            by_src.setdefault(s, []).append(m)
        for f, (_, d) in self.morphisms.items():
            for g in by_src.get(d, []):
                yield g, f

    def validate(self, assoc_budget=200_000):
        for x in self.objects:
            i = self.identities.get(x)
            if i is None or self.morphisms[i] != (x, x):
                raise CategoryError(f"bad identity at {x}")
        for m, (s, d) in self.morphisms.items():
            if s not in self.objects or d not in self.objects:
                raise CategoryError(f"morphism {m} has unknown endpoints")
            if self.compose(m, self.identities[s]) != m:
                raise CategoryError(f"right unit law fails at {m}")
            if self.compose(self.identities[d], m) != m:
                raise CategoryError(f"left unit law fails at {m}")
        count = 0
        for g, f in self.composable_pairs():
            for h in self.out_morphisms(self.dst(g)):
                if self.compose(h, self.compose(g, f)) != self.compose(
                    self.compose(h, g), f
                ):
                    raise CategoryError("associativity fails")
                count += 1
                if count >= assoc_budget:
                    return self
        return self

    def op(self):
        morphisms = {m: (d, s) for m, (s, d) in self.morphisms.items()}
        out = FiniteCategory(
            self.objects,
            morphisms,
            self.identities,
            composer=lambda g, f: self.compose(f, g),
        )
        return out

    def __repr__(self):
        return f"FiniteCategory({len(self.objects)} objects, {len(self.morphisms)} morphisms)"


def poset_category(relation, objects=None):
    """Category of a poset given as an iterable of (x, y) pairs x <= y;
    reflexivity and transitivity are completed automatically."""
    pairs = set(relation)
    if objects is None:
        objects = sorted({x for p in pairs for x in p})
    pairs |= {(x, x) for x in objects}
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(list(pairs), repeat=2):
            if b == c and (a, d) not in pairs:
                pairs.add((a, d))
                changed = True
    morphisms = {(x, y): (x, y) for x, y in pairs}
    identities = {x: (x, x) for x in objects}
    return FiniteCategory(
        objects, morphisms, identities, composer=lambda g, f: (f[0], g[1])
    )


def simplex_category(n):
    """The poset 0 < 1 < ... < n as a category."""
    return poset_category(
        [(i, j) for i in range(n + 1) for j in range(i, n + 1)],
        objects=list(range(n + 1)),
    )


def terminal_category():
    return simplex_category(0)


def iso_groupoid():
    """Two objects, one isomorphism: equivalent to the point."""
    objects = ["a", "b"]
    mids = {("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")}
    morphisms = {m: (m[0], m[1]) for m in mids}
    identities = {"a": ("a", "a"), "b": ("b", "b")}
    return FiniteCategory(
        objects, morphisms, identities, composer=lambda g, f: (f[0], g[1])
    )


def random_poset_category(rng, max_objects=4, edge_prob=0.5):
    n = int(rng.integers(2, max_objects + 1))
    pairs = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < edge_prob:
                pairs.append((i, j))
    return poset_category(pairs, objects=list(range(n)))


class CatFunctor:
    def __init__(self, src, dst, ob, mor, check=True):
        self.src = src
        self.dst = dst
        self.ob = dict(ob)
        self.mor = dict(mor)
        if check:
            self.validate()

    def validate(self, budget=50_000):
        for x in self.src.objects:
            if self.mor[self.src.identities[x]] != self.dst.identities[self.ob[x]]:
                raise CategoryError("functor does not preserve identities")
        for m, (s, d) in self.src.morphisms.items():
            if self.dst.morphisms[self.mor[m]] != (self.ob[s], self.ob[d]):
                raise CategoryError("functor breaks endpoints")
        count = 0
        for g, f in self.src.composable_pairs():
            if self.mor[self.src.compose(g, f)] != self.dst.compose(
                self.mor[g], self.mor[f]
            ):
                raise CategoryError("functor breaks composition")
            count += 1
            if count >= budget:
                break
        return self


def compose_functors(g, f):
    return CatFunctor(
        f.src,
        g.dst,
        {x: g.ob[y] for x, y in f.ob.items()},
        {m: g.mor[n] for m, n in f.mor.items()},
        check=False,
    )


def identity_functor(c):
    return CatFunctor(
        c, c, {x: x for x in c.objects}, {m: m for m in c.morphisms}, check=False
    )


def _maps_equal(f, g):
    if isinstance(f, CatFunctor):
        return f.ob == g.ob and f.mor == g.mor
    if isinstance(f, SimplicialMap):
        return f.assign == g.assign
    return f.assign == g.assign  # cubical maps


class CatDiagram:
    """A functor from a finite shape to categories / simplicial sets /
    cubical sets; values given explicitly on objects and morphisms."""

    def __init__(self, shape, ob, mor, compose_values=None, check=True):
        self.shape = shape
        self.ob = dict(ob)
        self.mor = dict(mor)
        self._compose_values = compose_values
        if check:
            self.validate()

    def value(self, x):
        return self.ob[x]

    def map(self, mid):
        return self.mor[mid]

    def validate(self):
        for g, f in self.shape.composable_pairs():
            gf = self.shape.compose(g, f)
            if self._compose_values is not None:
                comp = self._compose_values(self.mor[g], self.mor[f])
            elif isinstance(self.mor[f], CatFunctor):
                comp = compose_functors(self.mor[g], self.mor[f])
            else:
                comp = _compose_sset_maps(self.mor[g], self.mor[f])
            if not _maps_equal(comp, self.mor[gf]):
                raise CategoryError(f"diagram is not functorial at {gf}")
        return self


def _compose_sset_maps(g, f):
    assign = [
        {x: g.assign[k][y] for x, y in f.assign[k].items()}
        for k in range(min(len(f.assign), len(g.assign)))
    ]
    return SimplicialMap(f.src, g.dst, assign, check=False)


# -- nerve -------------------------------------------------------------

def nerve(c, cap):
    """Composable chains; n-simplices are n-chains, identities make the
    degeneracies."""
    levels = [list(c.objects)]
    for k in range(1, cap + 1):
        out = []
        if k == 1:
            for m in c.morphisms:
                out.append((m,))
        else:
            for chain in levels[k - 1]:
                for g in c.out_morphisms(c.dst(chain[-1])):
                    out.append(chain + (g,))
        levels.append(out)
    faces, degens = {}, {}
    for k in range(1, cap + 1):
        for j in range(k + 1):
            table = {}
            for chain in levels[k]:
                if k == 1:
                    table[chain] = c.dst(chain[0]) if j == 0 else c.src(chain[0])
                elif j == 0:
                    table[chain] = chain[1:]
                elif j == k:
                    table[chain] = chain[:-1]
                else:
                    merged = c.compose(chain[j], chain[j - 1])
                    table[chain] = chain[: j - 1] + (merged,) + chain[j + 1 :]
            faces[(k, j)] = table
    for k in range(cap):
        for j in range(k + 1):
            table = {}
            for chain in levels[k]:
                if k == 0:
                    table[chain] = (c.identities[chain],)
                else:
                    x = c.src(chain[j]) if j < k else c.dst(chain[-1])
                    ident = c.identities[x]
                    table[chain] = chain[:j] + (ident,) + chain[j:]
            degens[(k, j)] = table
    return SimplicialSet(levels, faces, degens, check=False)


def nerve_functor(fun, cap, nsrc=None, ndst=None):
    nsrc = nsrc or nerve(fun.src, cap)
    ndst = ndst or nerve(fun.dst, cap)
    assign = [{x: fun.ob[x] for x in nsrc.levels[0]}]
    for k in range(1, cap + 1):
        assign.append(
            {ch: tuple(fun.mor[m] for m in ch) for ch in nsrc.levels[k]}
        )
    return SimplicialMap(nsrc, ndst, assign, check=False)


# -- Grothendieck constructions ---------------------------------------

def grothendieck(diag):
    """Objects are pairs (x, y), morphisms are pairs (f, g) with
    g: F(f)(y) -> y'; also returns the projection functor."""
    j = diag.shape
    objects = [(x, y) for x in j.objects for y in diag.value(x).objects]
    morphisms = {}
    for f, (x, x1) in j.morphisms.items():
        fun = diag.map(f)
        fx1 = diag.value(x1)
        for y in diag.value(x).objects:
            for g in fx1.out_morphisms(fun.ob[y]):
                src = (x, y)
                dst = (x1, fx1.dst(g))
                morphisms[(src, dst, f, g)] = (src, dst)
    identities = {
        (x, y): ((x, y), (x, y), j.identities[x], diag.value(x).identities[y])
        for (x, y) in objects
    }

    def composer(mg, mf):
        (_, _, f1, g1) = mf
        (_, _, f2, g2) = mg
        x2 = j.dst(f2)
        transported = diag.map(f2).mor[g1]
        return (mf[0], mg[1], j.compose(f2, f1), diag.value(x2).compose(g2, transported))

    total = FiniteCategory(objects, morphisms, identities, composer=composer)
    proj = CatFunctor(
        total,
        j,
        {(x, y): x for (x, y) in objects},
        {m: m[2] for m in morphisms},
        check=False,
    )
    return total, proj


def op_diagram(diag):
    """Objectwise opposite of a diagram of categories (same shape)."""
    ob = {x: diag.value(x).op() for x in diag.shape.objects}
    mor = {
        m: CatFunctor(ob[s], ob[d], diag.map(m).ob, diag.map(m).mor, check=False)
        for m, (s, d) in diag.shape.morphisms.items()
    }
    return CatDiagram(diag.shape, ob, mor, check=False)


def grothendieck_t(diag):
    """Transposed construction (∫ of the objectwise opposite, then op);
    returns the category and the projection to shape^op."""
    total_op, proj_op = grothendieck(op_diagram(diag))
    total = total_op.op()
    proj = CatFunctor(
        total, diag.shape.op(), proj_op.ob, proj_op.mor, check=False
    )
    return total, proj


def twisted_arrows(c):
    """Objects are morphisms of c; morphisms f -> g are pairs (u, v)
    with g = v∘f∘u.  Returns (Tw, projection to c^op, projection to c)."""
    objects = list(c.morphisms)
    morphisms = {}
    for f in objects:
        for g in objects:
            for u in c.homset(c.src(g), c.src(f)):
                for v in c.homset(c.dst(f), c.dst(g)):
                    if c.compose(v, c.compose(f, u)) == g:
                        morphisms[(f, g, u, v)] = (f, g)
    identities = {
        f: (f, f, c.identities[c.src(f)], c.identities[c.dst(f)]) for f in objects
    }

    def composer(mg, mf):
        (_, _, u1, v1) = mf
        (_, _, u2, v2) = mg
        return (mf[0], mg[1], c.compose(u1, u2), c.compose(v2, v1))

    tw = FiniteCategory(objects, morphisms, identities, composer=composer)
    cop = c.op()
    to_op = CatFunctor(
        tw, cop, {f: c.src(f) for f in objects}, {m: m[2] for m in morphisms},
        check=False,
    )
    to_c = CatFunctor(
        tw, c, {f: c.dst(f) for f in objects}, {m: m[3] for m in morphisms},
        check=False,
    )
    return tw, to_op, to_c


# -- homotopy colimits -------------------------------------------------

def _chain_basepoint(shape, k, chain):
    return shape.src(chain[0]) if k >= 1 else chain


def hocolim_sset(diag, cap):
    """Diagonal of the bisimplicial set (p, q) -> ⊔_{chains} F(a_0)_q."""
    shape = diag.shape
    nj = nerve(shape, cap)
    levels = []
    for k in range(cap + 1):
        level = []
        for chain in nj.levels[k]:
            a0 = _chain_basepoint(shape, k, chain)
            for s in diag.value(a0).levels[k]:
                level.append((chain, s))
        levels.append(level)
    faces, degens = {}, {}
    for k in range(1, cap + 1):
        for j in range(k + 1):
            table = {}
            for chain, s in levels[k]:
                a0 = _chain_basepoint(shape, k, chain)
                chain2 = nj.face(k, j, chain)
                s2 = diag.value(a0).face(k, j, s)
                if j == 0:
                    s2 = diag.map(chain[0])(k - 1, s2)
                table[(chain, s)] = (chain2, s2)
            faces[(k, j)] = table
    for k in range(cap):
        for j in range(k + 1):
            table = {}
            for chain, s in levels[k]:
                a0 = _chain_basepoint(shape, k, chain)
                table[(chain, s)] = (
                    nj.degen(k, j, chain),
                    diag.value(a0).degen(k, j, s),
                )
            degens[(k, j)] = table
    return SimplicialSet(levels, faces, degens, check=False)


def hocolim_cset(diag, cap):
    """Homotopy colimit of a diagram of cubical sets: triangulate, then
    take the simplicial homotopy colimit."""
    from .cubical import triangulate, triangulate_map

    tri = {x: triangulate(diag.value(x), cap) for x in diag.shape.objects}
    ob = {x: tri[x].sset for x in diag.shape.objects}
    mor = {
        m: triangulate_map(diag.map(m), tri[s], tri[d])
        for m, (s, d) in diag.shape.morphisms.items()
    }
    sdiag = CatDiagram(diag.shape, ob, mor, check=False)
    return hocolim_sset(sdiag, cap)


def diagram_of_nerves(diag, cap):
    """Apply the nerve objectwise to a diagram of categories."""
    nerves = {x: nerve(diag.value(x), cap) for x in diag.shape.objects}
    mor = {
        m: nerve_functor(diag.map(m), cap, nerves[s], nerves[d])
        for m, (s, d) in diag.shape.morphisms.items()
    }
    return CatDiagram(diag.shape, nerves, mor, check=False)
