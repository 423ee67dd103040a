"""Grassmann presheaves of A^n and the section/subsheaf classification.

G(U) collects the rank-k free subsheaves of A^n over U, V(U) the locally
free ones.  Values are stored extensionally as stalk families, so the
restriction maps are literal and germ computation collapses to the value at
the minimal open.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Tuple

from .errors import NotLocallyFree, SearchBudgetExceeded
from .finalg import Submodule, enumerate_free_submodules, zero_vec
from .finspace import PointSet, Point, enumerate_opens
from .presheaf import compatible_families
from .vecsheaf import (
    AlgebraSheaf,
    ModuleSheaf,
    VectorSubsheaf,
    free_sheaf,
    is_free_of_rank,
    is_locally_free,
    make_subsheaf,
    restrict_subsheaf,
    DEFAULT_SEARCH_BUDGET,
)


@dataclass
class GrassmannPresheaf:
    base: AlgebraSheaf
    k: int
    n: int
    ambient: ModuleSheaf
    values: Dict[PointSet, List[VectorSubsheaf]]
    locally_free: bool  # False: the free-value presheaf G; True: V

    def restrict_value(self, s: VectorSubsheaf, v: PointSet) -> VectorSubsheaf:
        return restrict_subsheaf(s, v)


def _stalk_families(ambient: ModuleSheaf, u: PointSet,
                    candidates: Dict[Point, List[Submodule]]
                    ) -> List[Dict[Point, frozenset]]:
    """Per-point submodule choices closed under the ambient restrictions."""
    space = ambient.space
    pts = sorted(u)
    out: List[Dict[Point, frozenset]] = []

    def closed(x: Point, y: Point, fx: frozenset, fy: frozenset) -> bool:
        m = ambient.res[(x, y)]
        return all(m[v] in fy for v in fx)

    def rec(i: int, assign: Dict[Point, frozenset]):
        if i == len(pts):
            out.append(dict(assign))
            return
        x = pts[i]
        for cand in candidates[x]:
            fx = cand.elements
            ok = True
            for y in assign:
                if y in space.min_open[x] and not closed(x, y, fx, assign[y]):
                    ok = False
                    break
                if x in space.min_open[y] and not closed(y, x, assign[y], fx):
                    ok = False
                    break
            if ok:
                assign[x] = fx
                rec(i + 1, assign)
                del assign[x]

    rec(0, {})
    return out


def _enumerate_values(base: AlgebraSheaf, ambient: ModuleSheaf, k: int, n: int,
                      u: PointSet, locally_free: bool,
                      budget: int) -> List[VectorSubsheaf]:
    candidates = {x: enumerate_free_submodules(base.stalk_ring[x], n, k)
                  for x in sorted(u)}
    values = []
    for fam in _stalk_families(ambient, u, candidates):
        s = make_subsheaf(ambient, u, fam)
        if locally_free:
            if is_locally_free(s, u, k, budget):
                values.append(s)
        elif is_free_of_rank(s, u, k, budget)[0]:
            values.append(s)
    values.sort(key=VectorSubsheaf.sort_key)
    return values


def enumerate_free_subsheaves(a: AlgebraSheaf, k: int, n: int, u: PointSet,
                              budget: int = DEFAULT_SEARCH_BUDGET
                              ) -> List[VectorSubsheaf]:
    """Rank-k free subsheaves of A^n over u (one Grassmann value list)."""
    return _enumerate_values(a, free_sheaf(a, n), k, n, u, False, budget)


def enumerate_locally_free_subsheaves(a: AlgebraSheaf, k: int, n: int,
                                      u: PointSet,
                                      budget: int = DEFAULT_SEARCH_BUDGET
                                      ) -> List[VectorSubsheaf]:
    """Rank-k locally free subsheaves of A^n over u (one V value list)."""
    return _enumerate_values(a, free_sheaf(a, n), k, n, u, True, budget)


def build_grassmann_presheaf(a: AlgebraSheaf, k: int, n: int,
                             budget: int = DEFAULT_SEARCH_BUDGET
                             ) -> GrassmannPresheaf:
    """The presheaf U -> {free rank-k subsheaves of A^n over U}."""
    ambient = free_sheaf(a, n)
    values = {u: _enumerate_values(a, ambient, k, n, u, False, budget)
              for u in enumerate_opens(a.space)}
    return GrassmannPresheaf(a, k, n, ambient, values, locally_free=False)


def build_v_presheaf(a: AlgebraSheaf, k: int, n: int,
                     budget: int = DEFAULT_SEARCH_BUDGET) -> GrassmannPresheaf:
    """The complete companion: U -> {locally free rank-k subsheaves}."""
    ambient = free_sheaf(a, n)
    values = {u: _enumerate_values(a, ambient, k, n, u, True, budget)
              for u in enumerate_opens(a.space)}
    v = GrassmannPresheaf(a, k, n, ambient, values, locally_free=True)
    assert v_presheaf_complete(v), "locally-free value presheaf failed completeness"
    return v


def grassmann_monopresheaf(g: GrassmannPresheaf) -> bool:
    """Values are separated by their restrictions to the minimal-open cover."""
    space = g.base.space
    for u, vals in g.values.items():
        if not u:
            continue
        seen = {}
        for s in vals:
            key = tuple(restrict_subsheaf(s, space.min_open[x]).sort_key()
                        for x in sorted(u))
            if key in seen and seen[key] != s:
                return False
            seen[key] = s
    return True


def _glued_candidates(g: GrassmannPresheaf, u: PointSet) -> List[VectorSubsheaf]:
    """Glue compatible families over the minimal-open cover of u."""
    return [make_subsheaf(g.ambient, u,
                          {x: sec.family_at(x)
                           for x, sec in zip(sorted(u), fam_row)})
            for fam_row in _section_tuples(g, u)]


def _section_tuples(g: GrassmannPresheaf, u: PointSet):
    space = g.base.space
    return compatible_families(
        space, u,
        lambda x: g.values[space.min_open[x]],
        lambda x, y, s: restrict_subsheaf(s, space.min_open[y]))


def v_presheaf_complete(v: GrassmannPresheaf) -> bool:
    """Unit bijectivity: values over U = compatible minimal-open families."""
    for u in v.values:
        glued = _glued_candidates(v, u)
        if sorted(s.sort_key() for s in glued) != \
                sorted(s.sort_key() for s in v.values[u]):
            return False
    return True


def check_monopresheaf_not_complete(g: GrassmannPresheaf) -> dict:
    """Monopresheaf verdict plus an exhaustive hunt for a non-free glue.

    A compatible family over the minimal-open cover glues to a locally free
    subsheaf; any glue that is not free witnesses non-completeness of the
    free-value presheaf.  At desk scale (constant coefficient sheaves) such
    witnesses may not exist, which the report states explicitly.
    """
    witness = None
    for u in sorted(g.values, key=lambda s: (len(s), tuple(sorted(s)))):
        for cand in _glued_candidates(g, u):
            if not is_free_of_rank(cand, u, g.k)[0]:
                witness = {"open": sorted(u), "family": cand.sort_key()}
                break
        if witness:
            break
    return {
        "monopresheaf": grassmann_monopresheaf(g),
        "complete_at_this_scale": witness is None,
        "completeness_witness": witness,
    }


def check_lemma_free_locally_free_same_germs(g: GrassmannPresheaf,
                                             v: GrassmannPresheaf) -> bool:
    """Germ sets of the free and locally free value presheaves coincide.

    The germ set at x is the value list at min_open(x); a locally free value
    there is already free on min_open(x), since the minimal open of x is the
    smallest neighborhood available for a local witness.
    """
    space = g.base.space
    for x in space.points:
        ux = space.min_open[x]
        gk = sorted(s.sort_key() for s in g.values[ux])
        vk = sorted(s.sort_key() for s in v.values[ux])
        if gk != vk:
            return False
    return True


# -- sections of the generated Grassmann sheaf --------------------------------

@dataclass(frozen=True)
class GrassmannSection:
    """Compatible family of free rank-k values over the minimal opens."""
    family: Tuple[Tuple[Point, VectorSubsheaf], ...]

    def at(self, x: Point) -> VectorSubsheaf:
        return dict(self.family)[x]

    def sort_key(self):
        return tuple((x, s.sort_key()) for x, s in self.family)


def enumerate_sections(g: GrassmannPresheaf, u: PointSet) -> List[GrassmannSection]:
    """All sections of the generated sheaf over u, deterministically ordered."""
    pts = sorted(u)
    secs = [GrassmannSection(tuple(zip(pts, row))) for row in _section_tuples(g, u)]
    secs.sort(key=GrassmannSection.sort_key)
    return secs


def section_to_subsheaf(s: GrassmannSection) -> VectorSubsheaf:
    """Glue a section's stalkwise values into one subsheaf of A^n."""
    pts = [x for x, _ in s.family]
    ambient = s.family[0][1].ambient
    return make_subsheaf(ambient, frozenset(pts),
                         {x: val.family_at(x) for x, val in s.family})


def subsheaf_to_section(t: VectorSubsheaf, k: int,
                        budget: int = DEFAULT_SEARCH_BUDGET) -> GrassmannSection:
    """Restrict a locally free subsheaf to the minimal opens of its domain."""
    space = t.ambient.space
    family = []
    for x in sorted(t.domain):
        ux = space.min_open[x]
        piece = restrict_subsheaf(t, ux)
        if not is_free_of_rank(piece, ux, k, budget)[0]:
            raise NotLocallyFree(f"not free of rank {k} on min_open({x!r})")
        family.append((x, piece))
    return GrassmannSection(tuple(family))


# -- the universal (truncated) construction -----------------------------------

def build_universal_grassmann(a: AlgebraSheaf, n: int, truncation: int,
                              budget: int = DEFAULT_SEARCH_BUDGET
                              ) -> GrassmannPresheaf:
    """Rank-n Grassmann presheaf of A^N, N the finite truncation level."""
    if n > truncation:
        raise SearchBudgetExceeded(f"rank {n} exceeds truncation {truncation}")
    return build_grassmann_presheaf(a, n, truncation, budget)


def include_subsheaf(t: VectorSubsheaf, ambient: ModuleSheaf) -> VectorSubsheaf:
    """Coordinate inclusion A^N -> A^(N'): pad stalk vectors with zeros."""
    big_n = next(iter(ambient.rank_at.values()))
    pad = big_n - t.n
    assert pad >= 0
    fam = {}
    for x, vs in t.family:
        r = t.ambient.ring_at(x)
        fam[x] = frozenset(v + zero_vec(r, pad) for v in vs)
    return make_subsheaf(ambient, t.domain, fam)


def classify(a: AlgebraSheaf, n: int, truncation: int,
             budget: int = DEFAULT_SEARCH_BUDGET) -> dict:
    """Pair global sections of the truncated universal Grassmann with the
    rank-n vector subsheaves of A^N, checking the two maps are mutually
    inverse bijections."""
    whole = frozenset(a.space.points)
    g = build_universal_grassmann(a, n, truncation, budget)
    v = build_v_presheaf(a, n, truncation, budget)
    sections = enumerate_sections(g, whole)
    subsheaves = sorted(v.values[whole], key=VectorSubsheaf.sort_key)

    sub_keys = {t.sort_key(): i for i, t in enumerate(subsheaves)}
    sec_keys = {s.sort_key(): i for i, s in enumerate(sections)}
    pairs = []
    bijection = len(sections) == len(subsheaves)
    for i, s in enumerate(sections):
        t = section_to_subsheaf(s)
        j = sub_keys.get(t.sort_key())
        if j is None or subsheaf_to_section(t, n).sort_key() != s.sort_key():
            bijection = False
            break
        pairs.append([i, j])
    if bijection:
        for j, t in enumerate(subsheaves):
            s = subsheaf_to_section(t, n)
            i = sec_keys.get(s.sort_key())
            if i is None or section_to_subsheaf(s).sort_key() != t.sort_key():
                bijection = False
                break

    # Embedding cross-check: the image of the free rank-n sheaf under the
    # trivial-cover weighted embedding must be among the classified subsheaves.
    embed_image_found = None
    if n <= truncation and bijection:
        from .vecsheaf import (embed_via_weights, identity_trivialization,
                               trivial_weight_family)
        e = free_sheaf(a, n)
        morph = embed_via_weights(
            e, (whole,), {0: identity_trivialization(e, whole, n)},
            trivial_weight_family(a), n)
        fam = {x: frozenset(morph.maps[x].values()) for x in a.space.points}
        image = include_subsheaf(
            make_subsheaf(morph.target, whole, fam), g.ambient)
        embed_image_found = image.sort_key() in sub_keys

    return {
        "k": n,
        "n": truncation,
        "counts": {"sections": len(sections), "subsheaves": len(subsheaves)},
        "bijection": bijection,
        "pairs": pairs if bijection else [],
        "embed_image_found": embed_image_found,
    }
