import itertools

import pytest

from sheafkit.errors import InvalidMorphism
from sheafkit.finalg import (
    RingMorphism,
    find_ring_isomorphism,
    make_field,
    make_quotient,
)
from sheafkit.finspace import (
    constant_map,
    discrete2,
    enumerate_opens,
    point_space,
    pseudo_circle,
    sierpinski,
)
from sheafkit.presheaf import (
    SET,
    Carrier,
    build_presheaf,
    constant_presheaf,
    is_complete,
    is_monopresheaf,
    pullback,
    restrictions_injective_for_cover,
    sheafify,
    stalk,
    two_algebra_presheaf,
    unit_bijective,
    validate,
)

F2 = make_field(2)
F3 = make_field(3)
DUAL = make_quotient(2, [0, 0, 1])
RHO = RingMorphism(DUAL, F2, tuple(c % 2 for c in range(4)))


def counterexample_presheaf():
    """Value DUAL on opens containing the closed point c, F2 elsewhere."""
    return two_algebra_presheaf(sierpinski(), "c", DUAL, F2, RHO)


def corpus_presheaves():
    out = [
        ("constant F2 sierpinski", constant_presheaf(sierpinski(), F2)),
        ("constant F3 discrete2", constant_presheaf(discrete2(), F3)),
        ("constant F3 pseudo-circle", constant_presheaf(pseudo_circle(), F3)),
        ("two-algebra sierpinski", counterexample_presheaf()),
        ("two-algebra discrete2",
         two_algebra_presheaf(discrete2(), "u", DUAL, F2, RHO)),
    ]
    return out


def test_constant_presheaf_valid():
    assert validate(constant_presheaf(sierpinski(), F2)) == []


def test_counterexample_presheaf_valid():
    assert validate(counterexample_presheaf()) == []


def test_identity_violation_reported():
    p = constant_presheaf(sierpinski(), F2)
    u = frozenset({"o"})
    p.restrictions[(u, u)] = {0: 1, 1: 0}
    assert any("identity" in msg for msg in validate(p))


def test_composition_violation_reported():
    p = constant_presheaf(pseudo_circle(), F3)
    u = frozenset(p.space.points)
    v = frozenset({"a", "b"})
    p.restrictions[(u, v)] = {0: 1, 1: 2, 2: 0}
    assert any("composition" in msg for msg in validate(p))


@pytest.mark.parametrize("name,p", corpus_presheaves())
def test_corpus_functor_laws(name, p):
    assert validate(p) == []


# -- stalks ------------------------------------------------------------------

def test_constant_sheaf_stalk():
    p = constant_presheaf(sierpinski(), F2)
    assert len(stalk(p, "o").carrier.elements) == 2


def test_counterexample_stalks():
    p = counterexample_presheaf()
    assert len(stalk(p, "c").carrier.elements) == 4  # the dual numbers
    assert len(stalk(p, "o").carrier.elements) == 2  # F2


def test_germ_is_restriction_to_minimal_open():
    p = counterexample_presheaf()
    s = stalk(p, "o")
    whole = frozenset({"o", "c"})
    for e in p.carriers[whole].elements:
        assert s.germ(whole, e) == p.restrict(whole, frozenset({"o"}), e)


# -- separation --------------------------------------------------------------

def test_constant_presheaf_monopresheaf_on_connected_space():
    assert is_monopresheaf(constant_presheaf(sierpinski(), F2))
    assert is_monopresheaf(constant_presheaf(pseudo_circle(), F3))


def test_counterexample_is_monopresheaf():
    assert is_monopresheaf(counterexample_presheaf())


def non_separated_presheaf():
    """F2^2 over the whole discrete space, first-coordinate projection to
    both singletons: (0,0) and (0,1) share every germ."""
    space = discrete2()
    whole = frozenset(space.points)

    def carrier_fn(u):
        if u == whole:
            return Carrier(SET, ((0, 0), (0, 1), (1, 0), (1, 1)))
        return Carrier(SET, (0, 1))

    def restrict_fn(u, v, e):
        if u == v:
            return e
        if u == whole:
            return e[0] if v else 0
        return 0

    return build_presheaf(space, carrier_fn, restrict_fn)


def test_projection_presheaf_not_separated():
    p = non_separated_presheaf()
    assert validate(p) == []
    assert not is_monopresheaf(p)


@pytest.mark.parametrize("name,p", corpus_presheaves())
def test_monopresheaf_criterion_matches_all_covers(name, p):
    """Minimal-open cover verdict agrees with separation along every cover."""
    space = p.space
    opens = enumerate_opens(space)
    verdict = is_monopresheaf(p)
    for u in opens:
        if not u:
            continue
        nonempty = [v for v in opens if v and v <= u]
        for r in range(1, len(nonempty) + 1):
            for cover in itertools.combinations(nonempty, r):
                if frozenset().union(*cover) != u:
                    continue
                assert restrictions_injective_for_cover(p, u, list(cover)) or \
                    not verdict


# -- sheafification ----------------------------------------------------------

def test_sheafify_constant_on_discrete_enlarges_sections():
    p = constant_presheaf(discrete2(), F3)
    s = sheafify(p)
    whole = frozenset({"u", "v"})
    assert len(s.sections.carriers[whole].elements) == 9
    assert len(set(s.unit[whole].values())) == 3
    assert not unit_bijective(s, whole)


def test_sheafify_counterexample_sections():
    p = counterexample_presheaf()
    s = sheafify(p)
    whole = frozenset({"o", "c"})
    secs = s.sections.carriers[whole].elements
    # compatibility forces the germ at o to be rho of the germ at c
    assert len(secs) == 4
    pts = sorted(whole)  # [c, o]
    for fam in secs:
        assert fam[pts.index("o")] == RHO(fam[pts.index("c")])


def test_sheafified_sections_are_complete():
    for name, p in corpus_presheaves():
        s = sheafify(p)
        assert is_complete(s.sections), name


def test_is_complete_examples():
    assert not is_complete(constant_presheaf(discrete2(), F3))
    assert not is_complete(counterexample_presheaf())  # fails at the empty open


@pytest.mark.parametrize("name,p", corpus_presheaves())
def test_sheafify_preserves_stalks(name, p):
    s = sheafify(p)
    space = p.space
    for x in space.points:
        ux = space.min_open[x]
        assert len(s.sections.carriers[ux].elements) == \
            len(p.carriers[ux].elements)
        # the unit commutes with germ maps
        for u in s.unit:
            if x not in u:
                continue
            for e in p.carriers[u].elements:
                lhs = s.sections.restrictions[(u, ux)][s.unit[u][e]]
                rhs = s.unit[ux][p.restrict(u, ux, e)]
                assert lhs == rhs


@pytest.mark.parametrize("name,p", corpus_presheaves())
def test_sheafify_idempotent(name, p):
    s = sheafify(p)
    s2 = sheafify(s.sections)
    for u in s.sections.carriers:
        assert unit_bijective(s2, u)


@pytest.mark.parametrize("name,p", corpus_presheaves())
def test_complete_implies_monopresheaf(name, p):
    if is_complete(p):
        assert is_monopresheaf(p)
    s = sheafify(p)
    assert is_monopresheaf(s.sections)


# -- pullbacks ---------------------------------------------------------------

def test_pullback_along_identity_is_sheafification():
    p = counterexample_presheaf()
    space = p.space
    from sheafkit.finspace import ContinuousMap
    ident = ContinuousMap(space, space, {x: x for x in space.points})
    q = pullback(p, ident)
    s = sheafify(p)
    for u in q.carriers:
        assert set(q.carriers[u].elements) == \
            set(s.sections.carriers[u].elements)


def test_pullback_constant_maps_of_counterexample():
    p = counterexample_presheaf()
    pt = point_space()
    y = frozenset({"p"})
    q0 = pullback(p, constant_map(pt, p.space, "c"))
    q1 = pullback(p, constant_map(pt, p.space, "o"))
    assert len(q0.carriers[y].elements) == 4
    assert len(q1.carriers[y].elements) == 2
    assert find_ring_isomorphism(q0.carriers[y].ring,
                                 q1.carriers[y].ring) is None


def test_pullback_constant_map_stalks_isomorphic_to_target_stalk():
    p = counterexample_presheaf()
    pc = pseudo_circle()
    for target in p.space.points:
        q = pullback(p, constant_map(pc, p.space, target))
        for yy in pc.points:
            qring = q.stalk_carrier(yy).ring
            pring = stalk(p, target).carrier.ring
            assert find_ring_isomorphism(qring, pring) is not None


# -- the two-algebra construction --------------------------------------------

def test_two_algebra_carriers():
    p = counterexample_presheaf()
    whole = frozenset({"o", "c"})
    assert p.carriers[whole].ring is DUAL
    assert p.carriers[frozenset({"o"})].ring is F2
    assert p.carriers[frozenset()].ring is F2


def test_two_algebra_isolated_point():
    p = two_algebra_presheaf(discrete2(), "u", DUAL, F2, RHO)
    assert len(stalk(p, "u").carrier.elements) == 4
    assert len(stalk(p, "v").carrier.elements) == 2


def test_two_algebra_degenerate_is_constant():
    ident = RingMorphism(F2, F2, (0, 1))
    p = two_algebra_presheaf(sierpinski(), "c", F2, F2, ident)
    q = constant_presheaf(sierpinski(), F2)
    assert all(p.carriers[u].ring is q.carriers[u].ring for u in p.carriers)
    assert p.restrictions == q.restrictions


def test_two_algebra_rejects_non_morphism():
    bad = RingMorphism(DUAL, F2, (0, 0, 0, 0))
    with pytest.raises(InvalidMorphism):
        two_algebra_presheaf(sierpinski(), "c", DUAL, F2, bad)
