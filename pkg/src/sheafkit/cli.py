"""Command-line front end: JSON descriptions in, deterministic reports out.

The machine-readable report goes to stdout (or --out); a short human summary
goes to stderr.  Exit codes: 0 success, 1 parse/validation failure, 2 search
budget or size guard exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Tuple

from . import finalg, finspace, grassmann, presheaf as psh, vecsheaf
from .errors import (
    ParseError,
    SearchBudgetExceeded,
    SheafkitError,
    SpaceTooLarge,
    ValidationError,
)

EXIT_OK, EXIT_INVALID, EXIT_BUDGET = 0, 1, 2


# -- input parsing -----------------------------------------------------------

def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from exc


def parse_space(obj: dict) -> finspace.FinSpace:
    try:
        return finspace.build_space(obj["min_open"])
    except KeyError as exc:
        raise ParseError(f"space description missing {exc}") from exc
    except SpaceTooLarge:
        raise
    except SheafkitError as exc:
        raise ValidationError(f"invalid space: {exc}") from exc


def parse_ring(obj: dict) -> finalg.FinRing:
    try:
        kind = obj["kind"]
        if kind == "Fp":
            return finalg.make_field(obj["p"])
        if kind == "Zm":
            return finalg.make_mod_ring(obj["m"])
        if kind == "quotient":
            return finalg.make_quotient(obj["p"], obj["poly"])
        if kind == "product":
            return finalg.make_product(parse_ring(obj["left"]),
                                       parse_ring(obj["right"]))
    except KeyError as exc:
        raise ParseError(f"ring description missing {exc}") from exc
    except (finalg.NotPrime, finalg.InvalidPolynomial, finalg.RingError) as exc:
        raise ValidationError(f"invalid ring: {exc}") from exc
    raise ParseError(f"unknown ring kind {obj.get('kind')!r}")


def _open_key(u) -> str:
    return ",".join(sorted(u))


def parse_presheaf(space: finspace.FinSpace, obj: dict) -> psh.Presheaf:
    """Set-tagged presheaf: carriers and element-map restrictions by open key."""
    opens = finspace.enumerate_opens(space)
    try:
        carrier_tbl = obj["carriers"]
        restr_tbl = obj["restrictions"]
    except KeyError as exc:
        raise ParseError(f"presheaf description missing {exc}") from exc
    carriers = {}
    for u in opens:
        key = _open_key(u)
        if key not in carrier_tbl:
            raise ParseError(f"presheaf carrier missing for open {key!r}")
        carriers[u] = psh.Carrier(psh.SET, tuple(carrier_tbl[key]))
    restrictions = {}
    for u in opens:
        for v in opens:
            if not v <= u:
                continue
            if u == v:
                restrictions[(u, v)] = {e: e for e in carriers[u].elements}
                continue
            key = f"{_open_key(u)}|{_open_key(v)}"
            if key not in restr_tbl:
                raise ParseError(f"presheaf restriction missing for {key!r}")
            restrictions[(u, v)] = dict(restr_tbl[key])
    return psh.Presheaf(space, carriers, restrictions)


def _ring_code(ring: finalg.FinRing, name: str) -> int:
    try:
        return ring.names.index(name)
    except ValueError as exc:
        raise ParseError(f"unknown ring element {name!r}") from exc


def _parse_overlap_section(ring: finalg.FinRing, entry, pts) -> Tuple[int, ...]:
    if isinstance(entry, str):
        return tuple(_ring_code(ring, entry) for _ in pts)
    return tuple(_ring_code(ring, entry[x]) for x in pts)


def parse_cocycle(a: vecsheaf.AlgebraSheaf, ring: finalg.FinRing,
                  obj: dict) -> vecsheaf.TransitionCocycle:
    try:
        cover = tuple(frozenset(u) for u in obj["cover"])
        rank = obj["rank"]
        raw = obj["transitions"]
    except KeyError as exc:
        raise ParseError(f"cocycle description missing {exc}") from exc
    transitions = {}
    for key, mat in raw.items():
        i, j = (int(t) for t in key.split(","))
        pts = sorted(cover[i] & cover[j])
        transitions[(i, j)] = tuple(
            tuple(_parse_overlap_section(ring, entry, pts) for entry in row)
            for row in mat)
    return vecsheaf.TransitionCocycle(a, cover, rank, transitions)


def parse_weights(a: vecsheaf.AlgebraSheaf, ring: finalg.FinRing,
                  obj: dict) -> vecsheaf.WeightFamily:
    try:
        cover = tuple(frozenset(u) for u in obj["cover"])
        raw = obj["weights"]
    except KeyError as exc:
        raise ParseError(f"weights description missing {exc}") from exc
    pts = sorted(a.space.points)
    weights = tuple(_parse_overlap_section(ring, entry, pts) for entry in raw)
    return vecsheaf.WeightFamily(a, cover, weights)


def parse_map(codomain: finspace.FinSpace, obj: dict
              ) -> finspace.ContinuousMap:
    try:
        domain = parse_space(obj["space"])
        assignment = obj["assignment"]
    except KeyError as exc:
        raise ParseError(f"map description missing {exc}") from exc
    f = finspace.ContinuousMap(domain, codomain, dict(assignment))
    if not finspace.validate_map(f):
        raise ValidationError("map is not continuous")
    return f


# -- commands ----------------------------------------------------------------

def cmd_space_check(args) -> dict:
    space = parse_space(_load_json(args.space))
    opens = finspace.enumerate_opens(space)
    return {
        "command": "space-check",
        "points": sorted(space.points),
        "open_count": len(opens),
        "opens": [sorted(u) for u in opens],
        "connected": finspace.is_connected(space),
    }


def _presheaf_from_args(args) -> Tuple[finspace.FinSpace, psh.Presheaf]:
    space = parse_space(_load_json(args.space))
    p = parse_presheaf(space, _load_json(args.presheaf))
    return space, p


def cmd_presheaf_check(args) -> dict:
    space, p = _presheaf_from_args(args)
    report = psh.validate(p)
    out = {"command": "presheaf-check", "violations": report, "valid": not report}
    if not report:
        out["monopresheaf"] = psh.is_monopresheaf(p)
        out["complete"] = psh.is_complete(p)
    return out


def cmd_sheafify(args) -> dict:
    space, p = _presheaf_from_args(args)
    violations = psh.validate(p)
    if violations:
        raise ValidationError("; ".join(violations))
    s = psh.sheafify(p)
    per_open = {}
    for u in finspace.enumerate_opens(space):
        per_open[_open_key(u)] = {
            "carrier": len(p.carriers[u].elements),
            "sections": len(s.sections.carriers[u].elements),
            "unit_bijective": psh.unit_bijective(s, u),
        }
    return {"command": "sheafify", "opens": per_open,
            "unit_bijective_everywhere": all(v["unit_bijective"]
                                             for v in per_open.values())}


def cmd_stalks(args) -> dict:
    space, p = _presheaf_from_args(args)
    return {"command": "stalks",
            "stalk_sizes": {x: len(psh.stalk(p, x).carrier.elements)
                            for x in sorted(space.points)}}


def cmd_pullback(args) -> dict:
    space, p = _presheaf_from_args(args)
    f = parse_map(space, _load_json(args.map))
    q = psh.pullback(p, f)
    return {"command": "pullback",
            "domain_points": sorted(f.domain.points),
            "stalk_sizes": {y: len(psh.stalk(q, y).carrier.elements)
                            for y in sorted(f.domain.points)}}


def cmd_grassmann(args) -> dict:
    space = parse_space(_load_json(args.space))
    ring = parse_ring(_load_json(args.ring))
    a = vecsheaf.constant_algebra_sheaf(space, ring)
    g = grassmann.build_grassmann_presheaf(a, args.k, args.n, budget=args.budget)
    whole = frozenset(space.points)
    verdict = grassmann.check_monopresheaf_not_complete(g)
    return {
        "command": "grassmann",
        "k": args.k,
        "n": args.n,
        "ring": ring.label,
        "value_counts": {_open_key(u): len(v) for u, v in g.values.items()},
        "sections_over_whole": len(grassmann.enumerate_sections(g, whole)),
        "monopresheaf": verdict["monopresheaf"],
        "complete_at_this_scale": verdict["complete_at_this_scale"],
    }


def cmd_classify(args) -> dict:
    space = parse_space(_load_json(args.space))
    ring = parse_ring(_load_json(args.ring))
    a = vecsheaf.constant_algebra_sheaf(space, ring)
    report = grassmann.classify(a, args.n, args.N, budget=args.budget)
    report["command"] = "classify"
    report["ring"] = ring.label
    return report


def cmd_embed(args) -> dict:
    space = parse_space(_load_json(args.space))
    ring = parse_ring(_load_json(args.ring))
    a = vecsheaf.constant_algebra_sheaf(space, ring)
    cocycle = parse_cocycle(a, ring, _load_json(args.cocycle))
    try:
        glued = vecsheaf.sheaf_from_cocycle(cocycle)
    except vecsheaf.CocycleConditionViolated as exc:
        raise ValidationError(str(exc)) from exc
    w = parse_weights(a, ring, _load_json(args.weights))
    problems = vecsheaf.validate_weights(w)
    if problems:
        raise ValidationError("; ".join(problems))
    try:
        morph = vecsheaf.embed_via_weights(
            glued.sheaf, w.cover,
            {i: glued.trivializations[i] for i in range(len(glued.cover))},
            w, glued.rank)
    except (vecsheaf.InvalidWeights, vecsheaf.TrivializationMismatch) as exc:
        raise ValidationError(str(exc)) from exc
    return {
        "command": "embed",
        "rank": glued.rank,
        "cover_size": len(glued.cover),
        "target_rank": glued.rank * len(glued.cover),
        "monomorphism": vecsheaf.is_monomorphism(morph),
    }


def demo_counterexample(a0: Optional[finalg.FinRing] = None,
                        a1: Optional[finalg.FinRing] = None,
                        rho: Optional[finalg.RingMorphism] = None) -> dict:
    """Free rank-1 sheaf with non-isomorphic stalks on the two-point space.

    Defaults: stalk algebras F_2[t]/(t^2) at the closed point and F_2 at the
    open point, connected by evaluation at t = 0.  Pulling back along the two
    (homotopic) constant maps from a point yields non-isomorphic stalks, so
    pullback along homotopic maps need not preserve the isomorphism class.
    """
    space = finspace.sierpinski()
    x0, x1 = "c", "o"
    if a0 is None:
        a0 = finalg.make_quotient(2, [0, 0, 1])
    if a1 is None:
        a1 = finalg.make_field(2)
    if rho is None:
        # evaluation at t = 0: code sum(c_i 2^i) -> constant term c_0
        rho = finalg.RingMorphism(a0, a1, tuple(c % 2 for c in range(a0.size)))
    p = psh.two_algebra_presheaf(space, x0, a0, a1, rho)
    violations = psh.validate(p)
    s = psh.sheafify(p)
    point = finspace.point_space()
    pulls = {}
    pull_rings = {}
    for name, value in (("f0", x0), ("f1", x1)):
        f = finspace.constant_map(point, space, value)
        q = psh.pullback(p, f)
        carrier = q.carriers[frozenset({"p"})]
        pulls[name] = len(carrier.elements)
        pull_rings[name] = carrier.ring
    iso = finalg.find_ring_isomorphism(pull_rings["f0"], pull_rings["f1"])
    degenerate = pulls["f0"] == pulls["f1"] and iso is not None
    return {
        "command": "demo-counterexample",
        "presheaf_valid": not violations,
        "stalk_sizes": {"x0": len(psh.stalk(p, x0).carrier.elements),
                        "x1": len(psh.stalk(p, x1).carrier.elements)},
        "section_counts": {_open_key(u): len(s.sections.carriers[u].elements)
                           for u in finspace.enumerate_opens(space)},
        "pullback_stalk_sizes": pulls,
        "pullback_stalks_isomorphic": iso is not None,
        "conclusion": ("degenerate case: both pullback stalks are isomorphic"
                       if degenerate else
                       "pullbacks along the two homotopic constant maps are "
                       "not isomorphic: homotopic maps need not give "
                       "isomorphic pullbacks"),
    }


def cmd_demo(args) -> dict:
    return demo_counterexample()


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sheafkit")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--budget", type=int, default=vecsheaf.DEFAULT_SEARCH_BUDGET)
        sp.add_argument("--out", default=None)

    sp = sub.add_parser("space-check")
    sp.add_argument("--space", required=True)
    common(sp)
    sp.set_defaults(fn=cmd_space_check)

    for name, fn in (("presheaf-check", cmd_presheaf_check),
                     ("sheafify", cmd_sheafify),
                     ("stalks", cmd_stalks)):
        sp = sub.add_parser(name)
        sp.add_argument("--space", required=True)
        sp.add_argument("--presheaf", required=True)
        common(sp)
        sp.set_defaults(fn=fn)

    sp = sub.add_parser("pullback")
    sp.add_argument("--space", required=True)
    sp.add_argument("--presheaf", required=True)
    sp.add_argument("--map", required=True)
    common(sp)
    sp.set_defaults(fn=cmd_pullback)

    sp = sub.add_parser("grassmann")
    sp.add_argument("--space", required=True)
    sp.add_argument("--ring", required=True)
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("-n", type=int, required=True)
    common(sp)
    sp.set_defaults(fn=cmd_grassmann)

    sp = sub.add_parser("classify")
    sp.add_argument("--space", required=True)
    sp.add_argument("--ring", required=True)
    sp.add_argument("-n", type=int, required=True)
    sp.add_argument("-N", type=int, required=True)
    common(sp)
    sp.set_defaults(fn=cmd_classify)

    sp = sub.add_parser("embed")
    sp.add_argument("--space", required=True)
    sp.add_argument("--ring", required=True)
    sp.add_argument("--cocycle", required=True)
    sp.add_argument("--weights", required=True)
    common(sp)
    sp.set_defaults(fn=cmd_embed)

    sp = sub.add_parser("demo-counterexample")
    common(sp)
    sp.set_defaults(fn=cmd_demo)
    return ap


def _emit(report: dict, out: Optional[str]) -> None:
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _summary(report: dict) -> str:
    keys = [k for k in ("valid", "monopresheaf", "complete", "bijection",
                        "monomorphism", "conclusion", "connected")
            if k in report]
    bits = [f"{k}={report[k]}" for k in keys]
    return f"{report.get('command', '?')}: " + (", ".join(bits) or "done")


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        report = args.fn(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (SearchBudgetExceeded, SpaceTooLarge) as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    _emit(report, args.out)
    print(_summary(report), file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
