"""Presheaves of finite carriers on a finite T0 space.

The load-bearing simplification throughout: on a finite space the
neighborhood system of a point x has the minimal open U_x as smallest
element, so the direct limit defining the stalk collapses to the value at
U_x, and sections of the generated sheaf are finite compatible families of
germs indexed by points.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Dict, Hashable, List, Optional, Tuple

from .errors import InvalidMorphism, SpaceTooLarge
from .finalg import FinRing, ring_from_ops, validate_morphism, RingMorphism
from .finspace import FinSpace, PointSet, Point, enumerate_opens, ContinuousMap

Elem = Hashable
ElemMap = Dict[Elem, Elem]

DEFAULT_STATE_BOUND = 10 ** 6

SET, RING, MODULE = "set", "ring", "module"


@dataclass(frozen=True)
class Carrier:
    """Finite carrier attached to one open set.

    kind "set": bare elements.
    kind "ring": `ring` holds the structure; element i of `elements` is ring
    code i (for constructed presheaves the elements simply are the codes).
    kind "module": elements are nested tuples whose leaves are codes of the
    scalar ring `ring`; addition and scaling act leafwise.
    """
    kind: str
    elements: Tuple[Elem, ...]
    ring: Optional[FinRing] = None

    def index(self, e: Elem) -> int:
        return self.elements.index(e)

    # ring operations transported along the element/code alignment, so they
    # work whether elements are raw codes or constructed values
    def ring_add(self, a: Elem, b: Elem) -> Elem:
        return self.elements[self.ring.add(self.index(a), self.index(b))]

    def ring_mul(self, a: Elem, b: Elem) -> Elem:
        return self.elements[self.ring.mul(self.index(a), self.index(b))]

    def ring_zero(self) -> Elem:
        return self.elements[self.ring.zero]

    def ring_one(self) -> Elem:
        return self.elements[self.ring.one]


def _leaf_op(op, a, b):
    if isinstance(a, tuple):
        return tuple(_leaf_op(op, x, y) for x, y in zip(a, b))
    return op(a, b)


def _leaf_map(fn, a):
    if isinstance(a, tuple):
        return tuple(_leaf_map(fn, x) for x in a)
    return fn(a)


def module_add(c: Carrier, a: Elem, b: Elem) -> Elem:
    return _leaf_op(c.ring.add, a, b)


def module_scale(c: Carrier, s: int, a: Elem) -> Elem:
    return _leaf_map(lambda x: c.ring.mul(s, x), a)


@dataclass
class Presheaf:
    space: FinSpace
    carriers: Dict[PointSet, Carrier]
    restrictions: Dict[Tuple[PointSet, PointSet], ElemMap]

    @property
    def opens(self) -> List[PointSet]:
        return enumerate_opens(self.space)

    def carrier(self, u: PointSet) -> Carrier:
        return self.carriers[u]

    def restrict(self, u: PointSet, v: PointSet, e: Elem) -> Elem:
        return self.restrictions[(u, v)][e]

    def stalk_carrier(self, x: Point) -> Carrier:
        return self.carriers[self.space.min_open[x]]


def build_presheaf(space: FinSpace,
                   carrier_fn: Callable[[PointSet], Carrier],
                   restrict_fn: Callable[[PointSet, PointSet, Elem], Elem]) -> Presheaf:
    """Materialize carrier and restriction tables over all opens."""
    opens = enumerate_opens(space)
    carriers = {u: carrier_fn(u) for u in opens}
    restrictions = {}
    for u in opens:
        for v in opens:
            if v <= u:
                restrictions[(u, v)] = {e: restrict_fn(u, v, e)
                                        for e in carriers[u].elements}
    return Presheaf(space, carriers, restrictions)


def validate(p: Presheaf) -> List[str]:
    """Report of functor-law and structure violations; empty means valid."""
    problems = []
    opens = sorted(p.carriers, key=lambda u: (len(u), tuple(sorted(u))))
    for u in opens:
        r = p.restrictions.get((u, u))
        if r is None:
            problems.append(f"restrict({set(u)},{set(u)}) missing")
            continue
        for e in p.carriers[u].elements:
            if r.get(e) != e:
                problems.append(f"restrict to itself not identity on {set(u)}")
                break
    for u in opens:
        for v in opens:
            if not v <= u:
                continue
            ruv = p.restrictions[(u, v)]
            for e in p.carriers[u].elements:
                if ruv[e] not in p.carriers[v].elements:
                    problems.append(
                        f"restriction {set(u)}->{set(v)} leaves the carrier")
                    break
            for w in opens:
                if not w <= v:
                    continue
                rvw = p.restrictions[(v, w)]
                ruw = p.restrictions[(u, w)]
                if any(rvw[ruv[e]] != ruw[e] for e in p.carriers[u].elements):
                    problems.append(
                        f"composition fails {set(u)}->{set(v)}->{set(w)}")
    problems.extend(_structure_violations(p))
    return problems


def _structure_violations(p: Presheaf) -> List[str]:
    problems = []
    for (u, v), m in p.restrictions.items():
        cu, cv = p.carriers[u], p.carriers[v]
        if cu.kind == RING == cv.kind:
            f = RingMorphism(cu.ring, cv.ring,
                             tuple(cv.index(m[cu.elements[i]])
                                   for i in range(cu.ring.size)))
            if not validate_morphism(f):
                problems.append(f"restriction {set(u)}->{set(v)} not a ring morphism")
        elif cu.kind == MODULE == cv.kind and cu.ring is cv.ring:
            for a in cu.elements:
                for b in cu.elements:
                    if m[module_add(cu, a, b)] != module_add(cv, m[a], m[b]):
                        problems.append(
                            f"restriction {set(u)}->{set(v)} not additive")
                        break
                else:
                    continue
                break
    return problems


# -- stalks ------------------------------------------------------------------

@dataclass
class Stalk:
    presheaf: Presheaf
    point: Point
    carrier: Carrier

    def germ(self, u: PointSet, e: Elem) -> Elem:
        """Germ at the stalk point of a section over u."""
        return self.presheaf.restrict(u, self.presheaf.space.min_open[self.point], e)


def stalk(p: Presheaf, x: Point) -> Stalk:
    return Stalk(p, x, p.stalk_carrier(x))


# -- separation --------------------------------------------------------------

def is_monopresheaf(p: Presheaf) -> bool:
    """True iff sections are determined by their germs at every point.

    Injectivity into the product of stalks over the minimal-open cover
    suffices for every cover, since any cover of U refines {U_x : x in U}.
    Empty opens are skipped (they admit no points).
    """
    space = p.space
    for u in p.carriers:
        if not u:
            continue
        pts = sorted(u)
        seen = {}
        for e in p.carriers[u].elements:
            key = tuple(p.restrict(u, space.min_open[x], e) for x in pts)
            if key in seen and seen[key] != e:
                return False
            seen[key] = e
    return True


def restrictions_injective_for_cover(p: Presheaf, u: PointSet,
                                     cover: List[PointSet]) -> bool:
    """Direct separation check against an arbitrary open cover of u."""
    seen = {}
    for e in p.carriers[u].elements:
        key = tuple(p.restrict(u, v, e) for v in cover)
        if key in seen and seen[key] != e:
            return False
        seen[key] = e
    return True


# -- compatible germ families ------------------------------------------------

def compatible_families(space: FinSpace, carrier_pts: PointSet,
                        elems_at: Callable[[Point], List[Elem]],
                        res: Callable[[Point, Point, Elem], Elem],
                        state_bound: int = DEFAULT_STATE_BOUND) -> List[Tuple[Elem, ...]]:
    """All families (g_x) with g_y = res(x,y,g_x) whenever y ∈ min_open(x).

    Values are chosen at the maximal points of the open set and propagated
    downward; functoriality of `res` makes agreement at the propagated points
    equivalent to full compatibility. Families are tuples over sorted points.
    """
    pts = sorted(carrier_pts)
    maxpts = space.maximal_points(carrier_pts)
    states = 1
    for m in maxpts:
        states *= max(len(elems_at(m)), 1)
        if states > state_bound:
            raise SpaceTooLarge(f"section enumeration exceeds {state_bound} states")
    out = []
    for choice in itertools.product(*[elems_at(m) for m in maxpts]):
        assign: Dict[Point, Elem] = {}
        ok = True
        for m, val in zip(maxpts, choice):
            for y in sorted(space.min_open[m]):
                v = res(m, y, val)
                if y in assign:
                    if assign[y] != v:
                        ok = False
                        break
                else:
                    assign[y] = v
            if not ok:
                break
        if ok:
            out.append(tuple(assign[x] for x in pts))
    return out


# -- sheafification ----------------------------------------------------------

@dataclass
class SheafSpace:
    """Sheaf generated by a presheaf: sections are compatible germ families."""
    source: Presheaf
    sections: Presheaf            # the complete presheaf of sections
    unit: Dict[PointSet, ElemMap]  # per open: source carrier -> section


def _family_carrier(p: Presheaf, u: PointSet,
                    families: List[Tuple[Elem, ...]]) -> Carrier:
    """Equip a family set with the source presheaf's pointwise structure."""
    kind = p.carriers[u].kind
    pts = sorted(u)
    if kind == RING:
        stalks = [p.stalk_carrier(x) for x in pts]
        ring = ring_from_ops(
            families,
            lambda a, b: tuple(c.ring_add(x, y) for c, x, y in zip(stalks, a, b)),
            lambda a, b: tuple(c.ring_mul(x, y) for c, x, y in zip(stalks, a, b)),
            zero=tuple(c.ring_zero() for c in stalks),
            one=tuple(c.ring_one() for c in stalks),
            label=f"sections({sorted(u)})")
        return Carrier(RING, tuple(families), ring)
    if kind == MODULE:
        scalars = {p.stalk_carrier(x).ring for x in pts}
        if len(scalars) <= 1:
            ring = scalars.pop() if scalars else p.carriers[u].ring
            return Carrier(MODULE, tuple(families), ring)
    return Carrier(SET, tuple(families))


def sheafify(p: Presheaf, state_bound: int = DEFAULT_STATE_BOUND) -> SheafSpace:
    """Sections of the generated sheaf, with the unit map on every open."""
    space = p.space
    opens = sorted(p.carriers, key=lambda u: (len(u), tuple(sorted(u))))

    def res(x: Point, y: Point, e: Elem) -> Elem:
        return p.restrict(space.min_open[x], space.min_open[y], e)

    carriers: Dict[PointSet, Carrier] = {}
    fam_lists: Dict[PointSet, List] = {}
    for u in opens:
        fams = compatible_families(
            space, u, lambda x: list(p.stalk_carrier(x).elements), res,
            state_bound=state_bound)
        fam_lists[u] = fams
        carriers[u] = _family_carrier(p, u, fams)

    restrictions = {}
    for u in opens:
        pts = sorted(u)
        for v in opens:
            if not v <= u:
                continue
            idx = [pts.index(x) for x in sorted(v)]
            restrictions[(u, v)] = {f: tuple(f[i] for i in idx)
                                    for f in fam_lists[u]}
    sections = Presheaf(space, carriers, restrictions)

    unit = {}
    for u in opens:
        unit[u] = {e: tuple(p.restrict(u, space.min_open[x], e) for x in sorted(u))
                   for e in p.carriers[u].elements}
    return SheafSpace(p, sections, unit)


def unit_bijective(s: SheafSpace, u: PointSet) -> bool:
    image = set(s.unit[u].values())
    return (len(image) == len(s.unit[u])
            and image == set(s.sections.carriers[u].elements))


def is_complete(p: Presheaf) -> bool:
    """True iff the sheafification unit is bijective on every open."""
    s = sheafify(p)
    return all(unit_bijective(s, u) for u in p.carriers)


# -- pullback ----------------------------------------------------------------

def pullback(p: Presheaf, f: ContinuousMap) -> Presheaf:
    """Inverse-image sheaf along f: stalk at y is the stalk of p at f(y).

    Sections over V ⊆ Y are compatible families of germs (g_y ∈ stalk_{f(y)});
    continuity makes the stalk restriction of p along f(y') ∈ min_open(f(y))
    available whenever y' ∈ min_open(y).
    """
    space_y = f.domain
    space_x = p.space

    def res(y: Point, y2: Point, e: Elem) -> Elem:
        return p.restrict(space_x.min_open[f(y)], space_x.min_open[f(y2)], e)

    def carrier_fn(v: PointSet) -> Carrier:
        fams = compatible_families(
            space_y, v, lambda y: list(p.stalk_carrier(f(y)).elements), res)
        pts = sorted(v)
        kind = p.carriers[space_x.min_open[f(pts[0])]].kind if pts else SET
        if kind == RING:
            stalks = [p.stalk_carrier(f(y)) for y in pts]
            ring = ring_from_ops(
                fams,
                lambda a, b: tuple(c.ring_add(s, t) for c, s, t in zip(stalks, a, b)),
                lambda a, b: tuple(c.ring_mul(s, t) for c, s, t in zip(stalks, a, b)),
                zero=tuple(c.ring_zero() for c in stalks),
                one=tuple(c.ring_one() for c in stalks),
                label=f"pullback({sorted(v)})")
            return Carrier(RING, tuple(fams), ring)
        return Carrier(SET, tuple(fams))

    def restrict_fn(v: PointSet, w: PointSet, fam: Elem) -> Elem:
        pts = sorted(v)
        return tuple(fam[pts.index(y)] for y in sorted(w))

    return build_presheaf(space_y, carrier_fn, restrict_fn)


# -- morphisms ---------------------------------------------------------------

@dataclass
class PresheafMorphism:
    source: Presheaf
    target: Presheaf
    components: Dict[PointSet, ElemMap]


def validate_presheaf_morphism(m: PresheafMorphism) -> List[str]:
    problems = []
    for (u, v), r in m.source.restrictions.items():
        tu, tv = m.components[u], m.components[v]
        tr = m.target.restrictions[(u, v)]
        for e in m.source.carriers[u].elements:
            if tv[r[e]] != tr[tu[e]]:
                problems.append(f"naturality fails {set(u)}->{set(v)}")
                break
    return problems


# -- the two-algebra construction --------------------------------------------

def two_algebra_presheaf(space: FinSpace, x0: Point, a0: FinRing, a1: FinRing,
                         rho: RingMorphism) -> Presheaf:
    """Presheaf with value a0 on opens containing x0 and a1 elsewhere.

    Restriction is the identity within either regime and rho when the open
    drops x0. Its stalks are a0 at x0 and a1 at any point whose minimal open
    misses x0, which need not be isomorphic rings.
    """
    if rho.domain is not a0 or rho.codomain is not a1 or not validate_morphism(rho):
        raise InvalidMorphism("rho must be a unital morphism a0 -> a1")
    if x0 not in space.min_open:
        raise InvalidMorphism(f"{x0!r} not a point of the space")

    def carrier_fn(u: PointSet) -> Carrier:
        ring = a0 if x0 in u else a1
        return Carrier(RING, tuple(range(ring.size)), ring)

    def restrict_fn(u: PointSet, v: PointSet, e: int) -> int:
        if x0 in v:
            return e
        if x0 in u:
            return rho(e)
        return e

    return build_presheaf(space, carrier_fn, restrict_fn)


def constant_presheaf(space: FinSpace, ring: FinRing) -> Presheaf:
    """The (non-sheaf) constant assignment U -> ring with identity maps."""
    def carrier_fn(u: PointSet) -> Carrier:
        return Carrier(RING, tuple(range(ring.size)), ring)

    return build_presheaf(space, carrier_fn, lambda u, v, e: e)
