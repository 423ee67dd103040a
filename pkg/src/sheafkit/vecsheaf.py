"""Sheaves of modules over a sheaf of algebras on a finite space.

Sheaves are encoded stalkwise: a ring (or module) per point together with
restriction maps along specialization (y in min_open(x)).  On a finite space
this functor-on-points data determines the sheaf, and sections over an open
set are the compatible families of stalk values.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .errors import (
    CocycleConditionViolated,
    InvalidWeights,
    SearchBudgetExceeded,
    SheafkitError,
    TrivializationMismatch,
)
from .finalg import (
    FinRing,
    Matrix,
    Submodule,
    Vec,
    all_vecs,
    identity_matrix,
    is_invertible,
    is_unit,
    ring_from_ops,
    span,
    vec_add,
    vec_scale,
    zero_vec,
)
from .finspace import FinSpace, Point, PointSet
from .presheaf import (
    RING,
    Carrier,
    Presheaf,
    build_presheaf,
    compatible_families,
)

DEFAULT_SEARCH_BUDGET = 200_000


class AlgebraSheaf:
    """Structure sheaf: a ring per point plus stalk restriction morphisms.

    ``res[(x, y)]`` (for y in min_open(x)) maps stalk codes at x to stalk
    codes at y; identity pairs are filled in automatically.  Sections over an
    open set are compatible code families, which makes the induced presheaf
    of sections complete by construction.
    """

    def __init__(self, space: FinSpace, stalk_ring: Dict[Point, FinRing],
                 res: Dict[Tuple[Point, Point], Sequence[int]], label: str = ""):
        self.space = space
        self.stalk_ring = dict(stalk_ring)
        self.res: Dict[Tuple[Point, Point], Tuple[int, ...]] = {}
        for x in space.points:
            for y in space.min_open[x]:
                if x == y:
                    self.res[(x, x)] = tuple(range(stalk_ring[x].size))
                else:
                    self.res[(x, y)] = tuple(res[(x, y)])
        self.label = label or "A"

    def res_code(self, x: Point, y: Point, a: int) -> int:
        return self.res[(x, y)][a]

    def sections(self, u: PointSet) -> List[Tuple[int, ...]]:
        return compatible_families(
            self.space, u,
            lambda x: list(self.stalk_ring[x].elements()),
            lambda x, y, a: self.res[(x, y)][a])

    def germ(self, u: PointSet, sec: Tuple[int, ...], x: Point) -> int:
        return sec[sorted(u).index(x)]

    def restrict_section(self, u: PointSet, v: PointSet,
                         sec: Tuple[int, ...]) -> Tuple[int, ...]:
        pts = sorted(u)
        return tuple(sec[pts.index(x)] for x in sorted(v))

    def sec_add(self, u, a, b):
        return tuple(self.stalk_ring[x].add(s, t)
                     for x, s, t in zip(sorted(u), a, b))

    def sec_mul(self, u, a, b):
        return tuple(self.stalk_ring[x].mul(s, t)
                     for x, s, t in zip(sorted(u), a, b))

    def sec_zero(self, u):
        return tuple(self.stalk_ring[x].zero for x in sorted(u))

    def sec_one(self, u):
        return tuple(self.stalk_ring[x].one for x in sorted(u))

    def to_presheaf(self) -> Presheaf:
        """The (complete) presheaf of sections, with ring-tagged carriers."""
        def carrier_fn(u: PointSet) -> Carrier:
            secs = self.sections(u)
            pts = sorted(u)
            rings = [self.stalk_ring[x] for x in pts]
            ring = ring_from_ops(
                secs,
                lambda a, b: tuple(r.add(s, t) for r, s, t in zip(rings, a, b)),
                lambda a, b: tuple(r.mul(s, t) for r, s, t in zip(rings, a, b)),
                zero=self.sec_zero(u), one=self.sec_one(u),
                label=f"{self.label}({pts})")
            return Carrier(RING, tuple(secs), ring)

        return build_presheaf(self.space, carrier_fn,
                              lambda u, v, s: self.restrict_section(u, v, s))


def constant_algebra_sheaf(space: FinSpace, ring: FinRing) -> AlgebraSheaf:
    """Sheaf of locally constant functions with values in the ring."""
    return AlgebraSheaf(space, {x: ring for x in space.points},
                        {(x, y): tuple(range(ring.size))
                         for x in space.points for y in space.min_open[x]},
                        label=f"const({ring.label})")


def algebra_sheaf_from_presheaf(p: Presheaf) -> AlgebraSheaf:
    """Stalkwise algebra sheaf of a ring-tagged presheaf (its sheafification)."""
    space = p.space
    stalk_ring = {}
    res = {}
    for x in space.points:
        cx = p.stalk_carrier(x)
        if cx.kind != RING:
            raise SheafkitError("presheaf is not ring-tagged")
        stalk_ring[x] = cx.ring
        for y in space.min_open[x]:
            cy = p.stalk_carrier(y)
            res[(x, y)] = tuple(
                cy.index(p.restrict(space.min_open[x], space.min_open[y], e))
                for e in cx.elements)
    return AlgebraSheaf(space, stalk_ring, res)


class ModuleSheaf:
    """Module sheaf over an algebra sheaf, encoded stalkwise.

    The stalk at x is an explicit set of vectors in stalk_ring(x)^rank_at(x);
    restriction maps must be additive and semi-linear over the base.
    """

    def __init__(self, base: AlgebraSheaf, rank_at: Dict[Point, int],
                 stalk_elems: Dict[Point, Tuple[Vec, ...]],
                 res: Dict[Tuple[Point, Point], Dict[Vec, Vec]],
                 label: str = ""):
        self.base = base
        self.space = base.space
        self.rank_at = dict(rank_at)
        self.stalk_elems = {x: tuple(v) for x, v in stalk_elems.items()}
        self.res = {}
        for x in self.space.points:
            for y in self.space.min_open[x]:
                if x == y:
                    self.res[(x, x)] = {v: v for v in self.stalk_elems[x]}
                else:
                    self.res[(x, y)] = dict(res[(x, y)])
        self.label = label or "E"

    def ring_at(self, x: Point) -> FinRing:
        return self.base.stalk_ring[x]

    def sections(self, u: PointSet) -> List[Tuple[Vec, ...]]:
        return compatible_families(
            self.space, u,
            lambda x: list(self.stalk_elems[x]),
            lambda x, y, v: self.res[(x, y)][v])

    def validate(self) -> List[str]:
        problems = []
        for x in self.space.points:
            r = self.ring_at(x)
            zero = zero_vec(r, self.rank_at[x])
            if zero not in self.stalk_elems[x]:
                problems.append(f"stalk at {x!r} misses zero")
            for y in self.space.min_open[x]:
                m = self.res[(x, y)]
                ry = self.ring_at(y)
                for v in self.stalk_elems[x]:
                    for w in self.stalk_elems[x]:
                        if m[vec_add(r, v, w)] != vec_add(ry, m[v], m[w]):
                            problems.append(f"res({x!r},{y!r}) not additive")
                            break
                    else:
                        for a in r.elements():
                            ay = self.base.res_code(x, y, a)
                            if m[vec_scale(r, a, v)] != vec_scale(ry, ay, m[v]):
                                problems.append(
                                    f"res({x!r},{y!r}) not semi-linear")
                                break
                        else:
                            continue
                    break
                for z in self.space.min_open[y]:
                    mz = self.res[(y, z)]
                    mxz = self.res[(x, z)]
                    if any(mz[m[v]] != mxz[v] for v in self.stalk_elems[x]):
                        problems.append(
                            f"res composition fails {x!r}->{y!r}->{z!r}")
        return problems


def free_sheaf(a: AlgebraSheaf, n: int) -> ModuleSheaf:
    """The free module sheaf A^n with componentwise restriction."""
    space = a.space
    res = {}
    for x in space.points:
        for y in space.min_open[x]:
            res[(x, y)] = {v: tuple(a.res_code(x, y, c) for c in v)
                           for v in all_vecs(a.stalk_ring[x], n)}
    return ModuleSheaf(a, {x: n for x in space.points},
                       {x: tuple(all_vecs(a.stalk_ring[x], n))
                        for x in space.points},
                       res, label=f"{a.label}^{n}")


# -- vector subsheaves of A^n ------------------------------------------------

@dataclass(frozen=True)
class VectorSubsheaf:
    """Stalkwise family of submodules of the ambient free sheaf A^n.

    Equality and hashing are structural on (n, domain, family) so that
    subsheaves produced by independent enumerations compare equal.
    """
    ambient: ModuleSheaf = field(compare=False, hash=False)
    n: int
    domain: PointSet
    family: Tuple[Tuple[Point, FrozenSet[Vec]], ...]

    def family_at(self, x: Point) -> FrozenSet[Vec]:
        return dict(self.family)[x]

    def sort_key(self):
        return tuple((x, tuple(sorted(vs))) for x, vs in self.family)


def make_subsheaf(ambient: ModuleSheaf, domain: PointSet,
                  family: Dict[Point, FrozenSet[Vec]]) -> VectorSubsheaf:
    n = next(iter(ambient.rank_at.values()))
    return VectorSubsheaf(ambient, n, frozenset(domain),
                          tuple((x, frozenset(family[x])) for x in sorted(domain)))


def restrict_subsheaf(s: VectorSubsheaf, v: PointSet) -> VectorSubsheaf:
    return make_subsheaf(s.ambient, v, {x: s.family_at(x) for x in sorted(v)})


def full_subsheaf(ambient: ModuleSheaf, domain: PointSet) -> VectorSubsheaf:
    return make_subsheaf(ambient, domain,
                         {x: frozenset(ambient.stalk_elems[x])
                          for x in sorted(domain)})


def zero_subsheaf(ambient: ModuleSheaf, domain: PointSet) -> VectorSubsheaf:
    return make_subsheaf(
        ambient, domain,
        {x: frozenset({zero_vec(ambient.ring_at(x), ambient.rank_at[x])})
         for x in sorted(domain)})


def validate_subsheaf(s: VectorSubsheaf) -> List[str]:
    """Empty report iff each stalk is a submodule closed under restriction."""
    problems = []
    space = s.ambient.space
    for x in sorted(s.domain):
        sub = Submodule(s.ambient.ring_at(x), s.n, s.family_at(x))
        if not sub.validate():
            problems.append(f"family at {x!r} is not a submodule")
        for y in space.min_open[x]:
            m = s.ambient.res[(x, y)]
            if any(m[v] not in s.family_at(y) for v in s.family_at(x)):
                problems.append(
                    f"restriction {x!r}->{y!r} leaves the stalk family")
    return problems


def subsheaf_sections(s: VectorSubsheaf, u: PointSet) -> List[Tuple[Vec, ...]]:
    """Compatible germ families with germs constrained to the stalk family."""
    space = s.ambient.space
    return compatible_families(
        space, u,
        lambda x: sorted(s.family_at(x)),
        lambda x, y, v: s.ambient.res[(x, y)][v])


def is_free_of_rank(s: VectorSubsheaf, u: PointSet, k: int,
                    budget: int = DEFAULT_SEARCH_BUDGET
                    ) -> Tuple[bool, Optional[Tuple]]:
    """Search for k sections over u whose germs form a basis at every point.

    Exhaustive over k-subsets of the section list in deterministic order;
    returns the first witness found.
    """
    pts = sorted(u)
    if not pts:
        return True, ()
    for x in pts:
        r = s.ambient.ring_at(x)
        if len(s.family_at(x)) != r.size ** k:
            return False, None
    if k == 0:
        return True, ()
    secs = subsheaf_sections(s, u)
    tried = 0
    for combo in itertools.combinations(secs, k):
        tried += 1
        if tried > budget:
            raise SearchBudgetExceeded(f"freeness search exceeded {budget} tuples")
        ok = True
        for i, x in enumerate(pts):
            r = s.ambient.ring_at(x)
            germs = [sec[i] for sec in combo]
            if len(span(r, s.n, germs)) != len(s.family_at(x)):
                ok = False
                break
        if ok:
            return True, combo
    return False, None


def is_locally_free(s: VectorSubsheaf, u: PointSet, k: int,
                    budget: int = DEFAULT_SEARCH_BUDGET) -> bool:
    """Free on the minimal open of every point of u; minimal opens are the
    localizing cover on a finite space."""
    space = s.ambient.space
    for x in sorted(u):
        ux = space.min_open[x]
        if not is_free_of_rank(restrict_subsheaf(s, ux), ux, k, budget)[0]:
            return False
    return True


def module_free_of_rank(e: ModuleSheaf, u: PointSet, k: int,
                        budget: int = DEFAULT_SEARCH_BUDGET
                        ) -> Tuple[bool, Optional[Tuple]]:
    """Freeness of a module sheaf over u: k sections whose germs are a basis
    of every stalk.  Same search as for subsheaves, against the full stalks."""
    pts = sorted(u)
    if not pts:
        return True, ()
    for x in pts:
        r = e.ring_at(x)
        if len(e.stalk_elems[x]) != r.size ** k:
            return False, None
    if k == 0:
        return True, ()
    secs = e.sections(u)
    tried = 0
    for combo in itertools.combinations(secs, k):
        tried += 1
        if tried > budget:
            raise SearchBudgetExceeded(f"freeness search exceeded {budget} tuples")
        ok = True
        for i, x in enumerate(pts):
            r = e.ring_at(x)
            germs = [sec[i] for sec in combo]
            if len(span(r, e.rank_at[x], germs)) != len(e.stalk_elems[x]):
                ok = False
                break
        if ok:
            return True, combo
    return False, None


def module_locally_free(e: ModuleSheaf, u: PointSet, k: int,
                        budget: int = DEFAULT_SEARCH_BUDGET) -> bool:
    space = e.space
    return all(module_free_of_rank(e, space.min_open[x], k, budget)[0]
               for x in sorted(u))


# -- transition cocycles -----------------------------------------------------

SectionMatrix = Tuple[Tuple[Tuple[int, ...], ...], ...]  # entries are A-sections


@dataclass
class TransitionCocycle:
    """Invertible k x k matrices of overlap sections gluing local free pieces."""
    base: AlgebraSheaf
    cover: Tuple[PointSet, ...]
    rank: int
    transitions: Dict[Tuple[int, int], SectionMatrix]

    def overlap(self, i: int, j: int) -> PointSet:
        return self.cover[i] & self.cover[j]

    def germ_matrix(self, i: int, j: int, x: Point) -> Matrix:
        """Matrix over the stalk ring at x of the transition from chart j to i."""
        if i == j:
            return identity_matrix(self.base.stalk_ring[x], self.rank)
        g = self.transitions[(i, j)]
        pts = sorted(self.overlap(i, j))
        pos = pts.index(x)
        return Matrix(self.base.stalk_ring[x], self.rank, self.rank,
                      tuple(g[r][c][pos]
                            for r in range(self.rank) for c in range(self.rank)))


def validate_cocycle(c: TransitionCocycle) -> List[str]:
    problems = []
    m = len(c.cover)
    covered = set().union(*c.cover) if c.cover else set()
    if covered != set(c.base.space.points):
        problems.append("cover does not cover the space")
    for u in c.cover:
        if not c.base.space.is_open(u):
            problems.append("cover member is not open")
    for (i, j), g in c.transitions.items():
        ov = sorted(c.overlap(i, j))
        if len(g) != c.rank or any(len(row) != c.rank for row in g):
            problems.append(f"transition ({i},{j}) has wrong shape")
            continue
        for r_idx, row in enumerate(g):
            for entry in row:
                if len(entry) != len(ov):
                    problems.append(f"transition ({i},{j}) entry not an overlap section")
                    continue
                # entries must be sections of A over the overlap, otherwise
                # chart changes do not commute with the base restrictions
                for x in ov:
                    for y in c.base.space.min_open[x]:
                        if (c.base.res_code(x, y, entry[ov.index(x)])
                                != entry[ov.index(y)]):
                            problems.append(
                                f"transition ({i},{j}) entry incompatible at {x!r}->{y!r}")
        for x in ov:
            if not is_invertible(c.germ_matrix(i, j, x)):
                problems.append(f"transition ({i},{j}) not invertible at {x!r}")
    if problems:
        return problems
    for i in range(m):
        for j in range(m):
            for l in range(m):
                triple = c.cover[i] & c.cover[j] & c.cover[l]
                for x in sorted(triple):
                    lhs = _lookup_transition(c, i, j, x).mul(
                        _lookup_transition(c, j, l, x))
                    if lhs != _lookup_transition(c, i, l, x):
                        problems.append(
                            f"cocycle condition fails ({i},{j},{l}) at {x!r}")
    return problems


def _lookup_transition(c: TransitionCocycle, i: int, j: int, x: Point) -> Matrix:
    if i == j or (i, j) in c.transitions:
        return c.germ_matrix(i, j, x)
    # derive the reverse germ by matrix inversion over the stalk ring
    g = c.germ_matrix(j, i, x)
    return _matrix_inverse(g)


def _matrix_inverse(m: Matrix) -> Matrix:
    from .finalg import det
    r = m.ring
    d = det(m)
    dinv = next(y for y in r.elements() if r.mul(d, y) == r.one)
    k = m.rows
    if k == 1:
        return Matrix(r, 1, 1, (dinv,))
    adj = []
    for i in range(k):
        for j in range(k):
            cof = det(m.minor(j, i))
            if (i + j) % 2:
                cof = r.neg(cof)
            adj.append(r.mul(dinv, cof))
    return Matrix(r, k, k, tuple(adj))


@dataclass
class GluedSheaf:
    sheaf: ModuleSheaf
    cover: Tuple[PointSet, ...]
    rank: int
    # per cover index: point -> matrix carrying glued stalk coords to chart coords
    trivializations: Dict[int, Dict[Point, Matrix]]


def sheaf_from_cocycle(c: TransitionCocycle) -> GluedSheaf:
    """Glue the local free pieces A^k along the cocycle.

    The stalk at x uses the chart of the least cover index containing x;
    restriction along specialization composes the base restriction with the
    germ of the chart-change matrix.
    """
    problems = validate_cocycle(c)
    if problems:
        raise CocycleConditionViolated("; ".join(problems))
    a = c.base
    space = a.space
    k = c.rank

    def chart(x: Point) -> int:
        return min(i for i, u in enumerate(c.cover) if x in u)

    stalk_elems = {x: tuple(all_vecs(a.stalk_ring[x], k)) for x in space.points}
    res = {}
    for x in space.points:
        for y in space.min_open[x]:
            if y == x:
                continue
            change = _lookup_transition(c, chart(y), chart(x), y)
            res[(x, y)] = {
                v: change.apply(tuple(a.res_code(x, y, comp) for comp in v))
                for v in stalk_elems[x]}
    sheaf = ModuleSheaf(a, {x: k for x in space.points}, stalk_elems, res,
                        label=f"glued(k={k})")
    trivs = {i: {x: _lookup_transition(c, i, chart(x), x) for x in sorted(u)}
             for i, u in enumerate(c.cover)}
    return GluedSheaf(sheaf, c.cover, k, trivs)


# -- morphisms ---------------------------------------------------------------

@dataclass
class ModuleMorphism:
    source: ModuleSheaf
    target: ModuleSheaf
    maps: Dict[Point, Dict[Vec, Vec]]


def validate_module_morphism(m: ModuleMorphism) -> List[str]:
    problems = []
    space = m.source.space
    for x in space.points:
        r = m.source.ring_at(x)
        h = m.maps[x]
        for v in m.source.stalk_elems[x]:
            for w in m.source.stalk_elems[x]:
                if h[vec_add(r, v, w)] != vec_add(r, h[v], h[w]):
                    problems.append(f"component at {x!r} not additive")
                    break
            else:
                for a in r.elements():
                    if h[vec_scale(r, a, v)] != vec_scale(r, a, h[v]):
                        problems.append(f"component at {x!r} not linear")
                        break
                else:
                    continue
            break
        for y in space.min_open[x]:
            hy = m.maps[y]
            if any(m.target.res[(x, y)][h[v]] != hy[m.source.res[(x, y)][v]]
                   for v in m.source.stalk_elems[x]):
                problems.append(f"naturality fails {x!r}->{y!r}")
    return problems


def is_monomorphism(m: ModuleMorphism) -> bool:
    """True iff every stalk component is injective."""
    for x in m.source.space.points:
        images = set(m.maps[x].values())
        if len(images) != len(m.maps[x]):
            return False
    return True


def _invertible_matrices(r: FinRing, k: int):
    for entries in itertools.product(r.elements(), repeat=k * k):
        mat = Matrix(r, k, k, entries)
        if is_invertible(mat):
            yield mat


def find_module_isomorphism(e: ModuleSheaf, f: ModuleSheaf,
                            budget: int = DEFAULT_SEARCH_BUDGET
                            ) -> Optional[ModuleMorphism]:
    """Exhaustive search for a natural family of linear bijections e -> f.

    Stalks must be full free modules; candidates at each point are the
    invertible matrices over the stalk ring, assigned in point order with
    naturality pruning against already-assigned specialization pairs.
    Returns the lexicographically least witness, or None after exhaustion.
    """
    space = e.space
    pts = sorted(space.points)
    for x in pts:
        r = e.ring_at(x)
        if e.rank_at[x] != f.rank_at[x]:
            return None
        full = r.size ** e.rank_at[x]
        if len(e.stalk_elems[x]) != full or len(f.stalk_elems[x]) != full:
            raise SearchBudgetExceeded(
                "isomorphism search requires full free stalks")

    assigned: Dict[Point, Matrix] = {}
    tried = [0]

    def natural_pair(x: Point, y: Point) -> bool:
        hx, hy = assigned[x], assigned[y]
        return all(
            f.res[(x, y)][hx.apply(v)] == hy.apply(e.res[(x, y)][v])
            for v in e.stalk_elems[x])

    def extend(i: int) -> bool:
        if i == len(pts):
            return True
        x = pts[i]
        for cand in _invertible_matrices(e.ring_at(x), e.rank_at[x]):
            tried[0] += 1
            if tried[0] > budget:
                raise SearchBudgetExceeded(
                    f"isomorphism search exceeded {budget} candidates")
            assigned[x] = cand
            ok = all(natural_pair(x, y) for y in space.min_open[x] if y in assigned) \
                and all(natural_pair(z, x) for z in assigned
                        if x in space.min_open[z])
            if ok and extend(i + 1):
                return True
            del assigned[x]
        return False

    if not extend(0):
        return None
    maps = {x: {v: assigned[x].apply(v) for v in e.stalk_elems[x]} for x in pts}
    return ModuleMorphism(e, f, maps)


# -- weight families ---------------------------------------------------------

@dataclass
class WeightFamily:
    """Algebraic surrogate for a subordinate partition of unity.

    Global sections of A, one per cover member, with (a) zero germ outside
    the member and (b) a unit germ at every point for at least one member.
    These are the only two features of a partition of unity the embedding
    argument uses.
    """
    base: AlgebraSheaf
    cover: Tuple[PointSet, ...]
    weights: Tuple[Tuple[int, ...], ...]  # global sections, indexed like cover


def validate_weights(w: WeightFamily) -> List[str]:
    problems = []
    a = w.base
    space = a.space
    whole = frozenset(space.points)
    pts = sorted(whole)
    global_secs = set(map(tuple, a.sections(whole)))
    if len(w.weights) != len(w.cover):
        problems.append("weight count differs from cover size")
        return problems
    for i, sec in enumerate(w.weights):
        if tuple(sec) not in global_secs:
            problems.append(f"weight {i} is not a global section")
            continue
        for x in pts:
            if x not in w.cover[i] and a.germ(whole, sec, x) != a.stalk_ring[x].zero:
                problems.append(f"weight {i} has nonzero germ at {x!r} off its support")
    for x in pts:
        if not any(x in w.cover[i]
                   and is_unit(a.stalk_ring[x], a.germ(whole, w.weights[i], x))
                   for i in range(len(w.cover))):
            problems.append(f"no weight has a unit germ at {x!r}")
    return problems


def enumerate_weight_families(a: AlgebraSheaf, cover: Tuple[PointSet, ...],
                              budget: int = DEFAULT_SEARCH_BUDGET
                              ) -> List[WeightFamily]:
    """All valid weight families for the cover, by exhaustive search over
    tuples of global sections."""
    whole = frozenset(a.space.points)
    secs = a.sections(whole)
    total = len(secs) ** len(cover)
    if total > budget:
        raise SearchBudgetExceeded(f"{total} candidate families exceed {budget}")
    out = []
    for choice in itertools.product(secs, repeat=len(cover)):
        w = WeightFamily(a, tuple(cover), tuple(map(tuple, choice)))
        if not validate_weights(w):
            out.append(w)
    return out


def trivial_weight_family(a: AlgebraSheaf) -> WeightFamily:
    whole = frozenset(a.space.points)
    return WeightFamily(a, (whole,), (a.sec_one(whole),))


# -- the embedding construction ----------------------------------------------

def identity_trivialization(e: ModuleSheaf, u: PointSet, k: int) -> Dict[Point, Matrix]:
    return {x: identity_matrix(e.ring_at(x), k) for x in sorted(u)}


def embed_via_weights(e: ModuleSheaf, cover: Tuple[PointSet, ...],
                      trivializations: Dict[int, Dict[Point, Matrix]],
                      w: WeightFamily, k: int) -> ModuleMorphism:
    """Weighted juxtaposition of the local trivializations.

    Sends a stalk element u at x to the concatenation, over cover members,
    of (germ of weight i at x) * (chart-i coordinates of u), the block being
    zero when x lies outside member i.  With valid weights the result is a
    stalkwise-injective morphism into A^(k*m), m the cover size.
    """
    problems = validate_weights(w)
    if problems:
        raise InvalidWeights("; ".join(problems))
    if tuple(w.cover) != tuple(cover):
        raise InvalidWeights("weight family cover differs from embedding cover")
    a = e.base
    space = a.space
    whole = frozenset(space.points)
    m = len(cover)
    for i, u in enumerate(cover):
        psis = trivializations[i]
        for x in sorted(u):
            psi = psis[x]
            if psi.rows != k or psi.cols != k or not is_invertible(psi):
                raise TrivializationMismatch(
                    f"trivialization {i} at {x!r} is not a k x k isomorphism")
            for y in space.min_open[x]:
                lhs = {v: psis[y].apply(e.res[(x, y)][v]) for v in e.stalk_elems[x]}
                rhs = {v: tuple(a.res_code(x, y, comp) for comp in psi.apply(v))
                       for v in e.stalk_elems[x]}
                if lhs != rhs:
                    raise TrivializationMismatch(
                        f"trivialization {i} not natural at {x!r}->{y!r}")

    target = free_sheaf(a, k * m)
    maps = {}
    for x in space.points:
        r = a.stalk_ring[x]
        comp = {}
        for v in e.stalk_elems[x]:
            blocks = []
            for i in range(m):
                if x in cover[i]:
                    alpha = a.germ(whole, w.weights[i], x)
                    blocks.extend(vec_scale(r, alpha, trivializations[i][x].apply(v)))
                else:
                    blocks.extend(zero_vec(r, k))
            comp[v] = tuple(blocks)
        maps[x] = comp
    morph = ModuleMorphism(e, target, maps)
    assert not validate_module_morphism(morph)
    return morph
