import itertools

import pytest

from sheafkit.errors import (
    MinOpenNotOpen,
    NotT0,
    PointMissingFromOwnNeighborhood,
    SpaceTooLarge,
)
from sheafkit.finspace import (
    ContinuousMap,
    build_space,
    chain3,
    constant_map,
    discrete2,
    enumerate_opens,
    is_connected,
    point_space,
    pseudo_circle,
    sierpinski,
    validate_map,
)

CORPUS = [point_space, sierpinski, chain3, discrete2, pseudo_circle]


def brute_force_opens(space):
    """Oracle: scan all subsets for the open-set condition."""
    pts = sorted(space.points)
    out = []
    for r in range(len(pts) + 1):
        for sub in itertools.combinations(pts, r):
            s = frozenset(sub)
            if all(space.min_open[x] <= s for x in s):
                out.append(s)
    return sorted(out, key=lambda u: (len(u), tuple(sorted(u))))


def test_build_singleton():
    s = build_space({"p": ["p"]})
    assert s.points == ("p",)


def test_build_sierpinski():
    s = sierpinski()
    assert s.min_open["c"] == frozenset({"o", "c"})


def test_build_pseudo_circle():
    s = pseudo_circle()
    assert s.min_open["c"] == frozenset({"a", "b", "c"})
    assert s.min_open["d"] == frozenset({"a", "b", "d"})


def test_build_rejects_missing_self():
    with pytest.raises(PointMissingFromOwnNeighborhood):
        build_space({"a": ["b"], "b": ["b"]})


def test_build_rejects_non_open_min_open():
    # min_open(b) = {a,b} but min_open(a) = {c,a} is not inside it
    with pytest.raises(MinOpenNotOpen):
        build_space({"a": ["c", "a"], "b": ["a", "b"], "c": ["c"]})


def test_build_rejects_non_t0():
    with pytest.raises(NotT0):
        build_space({"a": ["a", "b"], "b": ["a", "b"]})


def test_build_rejects_too_many_points():
    with pytest.raises(SpaceTooLarge):
        build_space({str(i): [str(i)] for i in range(13)})


def test_enumerate_opens_point():
    s = point_space()
    assert enumerate_opens(s) == [frozenset(), frozenset({"p"})]


def test_enumerate_opens_sierpinski():
    s = sierpinski()
    assert enumerate_opens(s) == [frozenset(), frozenset({"o"}),
                                  frozenset({"c", "o"})]


def test_enumerate_opens_pseudo_circle_count():
    assert len(enumerate_opens(pseudo_circle())) == 7


def test_enumerate_opens_guard():
    s = discrete2()
    with pytest.raises(SpaceTooLarge):
        enumerate_opens(s, max_opens=2)


@pytest.mark.parametrize("make", CORPUS)
def test_enumerate_opens_matches_brute_force(make):
    s = make()
    assert enumerate_opens(s) == brute_force_opens(s)


@pytest.mark.parametrize("make", CORPUS)
def test_opens_closed_under_union_and_intersection(make):
    s = make()
    opens = set(enumerate_opens(s))
    for u in opens:
        for v in opens:
            assert u | v in opens
            assert u & v in opens


@pytest.mark.parametrize("make", CORPUS)
def test_minimal_opens_transitive(make):
    s = make()
    for x in s.points:
        for y in s.min_open[x]:
            assert s.min_open[y] <= s.min_open[x]


@pytest.mark.parametrize("make", CORPUS)
def test_constant_and_identity_maps_continuous(make):
    s = make()
    ident = ContinuousMap(s, s, {x: x for x in s.points})
    assert validate_map(ident)
    for target in s.points:
        assert validate_map(constant_map(s, s, target))


def test_sierpinski_swap_not_continuous():
    s = sierpinski()
    assert not validate_map(ContinuousMap(s, s, {"o": "c", "c": "o"}))


@pytest.mark.parametrize("make_dom", CORPUS)
@pytest.mark.parametrize("make_cod", [sierpinski, discrete2])
def test_continuity_matches_preimage_criterion(make_dom, make_cod):
    dom, cod = make_dom(), make_cod()
    opens = enumerate_opens(cod)
    for images in itertools.product(cod.points, repeat=len(dom.points)):
        f = ContinuousMap(dom, cod, dict(zip(dom.points, images)))
        preimage_ok = all(
            dom.is_open({x for x in dom.points if f(x) in v}) for v in opens)
        assert validate_map(f) == preimage_ok


def test_is_connected_examples():
    assert is_connected(sierpinski())
    assert is_connected(pseudo_circle())
    assert is_connected(chain3())
    assert not is_connected(discrete2())


@pytest.mark.parametrize("make", CORPUS)
def test_is_connected_matches_open_partition_scan(make):
    s = make()
    opens = enumerate_opens(s)
    has_partition = any(
        u and v and not (u & v) and (u | v) == frozenset(s.points)
        for u in opens for v in opens)
    assert is_connected(s) == (not has_partition)
