"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 input validation error, 4 internal
audit failure.  All output is deterministic: identical inputs give
byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import bubble_trees, flip_resolution, fm_config, localization, notation, wallcross
from .exact_algebra import (
    EquivariantLaurent,
    GradedSymbol,
    laurent_from_json,
    laurent_to_json,
    laurent_to_text,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_AUDIT = 4


class ValidationFailure(Exception):
    pass


def _jprint(data) -> None:
    print(json.dumps(data, sort_keys=True, indent=2))


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationFailure(f"cannot read {path}: {exc}") from exc


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip() != ""]
    except ValueError as exc:
        raise ValidationFailure(f"expected a comma-separated integer list, got {text!r}") from exc


def _frac_list(text: str) -> list[Fraction]:
    try:
        return [Fraction(x) for x in text.split(",") if x.strip() != ""]
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationFailure(f"expected a comma-separated rational list, got {text!r}") from exc


def _load_form(path: str) -> wallcross.IntersectionForm:
    data = _load_json(path)
    if data.get("schema") != 1:
        raise ValidationFailure(f"{path}: unsupported schema")
    extra = set(data) - {"schema", "matrix"}
    if extra:
        raise ValidationFailure(f"{path}: unknown fields {sorted(extra)}")
    try:
        return wallcross.IntersectionForm.make(data["matrix"])
    except (KeyError, wallcross.WallError) as exc:
        raise ValidationFailure(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_trees(args) -> int:
    if args.K < 1:
        raise ValidationFailure("K must be >= 1")
    trees = bubble_trees.enumerate_trees(args.K)
    ghosts = [t for t in trees if t.is_ghost_tree()]
    if args.dot:
        poset = flip_resolution.build_poset(args.K, args.chi, args.sigma)
        print(poset.to_dot())
        return EXIT_OK
    if args.json:
        _jprint(
            {
                "schema": 1,
                "K": args.K,
                "count": len(trees),
                "ghost_count": len(ghosts),
                "trees": [
                    {"bracket": t.canonical(), "ghost": t.is_ghost_tree()}
                    for t in trees
                ],
            }
        )
        return EXIT_OK
    print(f"{len(trees)} trees, {len(ghosts)} ghost")
    for t in trees:
        tag = "  [ghost]" if t.is_ghost_tree() else ""
        print(f"  {t.canonical()}{tag}")
    if args.hasse:
        poset = flip_resolution.build_poset(args.K, args.chi, args.sigma)
        print("cover relations (contraction order, toward the top stratum):")
        for a, b in poset.hasse:
            print(f"  {a} -> {b}")
    return EXIT_OK


def cmd_flip(args) -> int:
    if args.K < 1:
        raise ValidationFailure("K must be >= 1")
    if (args.chi + args.sigma) % 2:
        raise ValidationFailure("chi + sigma must be even")
    if args.dot:
        before = flip_resolution.build_poset(args.K, args.chi, args.sigma)
        print("// stratification before resolution")
        print(before.to_dot())
    poset, log = flip_resolution.resolve(args.K, args.chi, args.sigma)
    payload = {
        "schema": 1,
        "K": args.K,
        "chi": args.chi,
        "sigma": args.sigma,
        "events": [flip_resolution.event_to_json(e) for e in log],
        "final_strata": sorted(poset.active),
        "resolved": sorted(poset.resolved),
        "audits": "ok",
    }
    if args.json:
        _jprint(payload)
        return EXIT_OK
    print(f"{len(log)} flip events, final poset has {len(poset.active)} strata (ghost-free)")
    for e in log:
        dims = ", ".join(
            f"v{f.vertex}: sphere S^{f.sphere_dim}, exceptional fiber {f.fiber_dim}"
            for f in e.ends
        )
        print(f"  m={e.energy}  {e.tree}  ->  cut {e.marked_tree}  [{dims}]")
    if args.dot:
        print("// stratification after resolution")
        print(poset.to_dot())
    return EXIT_OK


def cmd_fm_limit(args) -> int:
    data = _load_json(args.input)
    try:
        family = fm_config.PolynomialFamily.from_json(data)
        limit = fm_config.limit_stratum(family)
    except fm_config.ConfigError as exc:
        raise ValidationFailure(str(exc)) from exc
    payload = fm_config.limit_to_json(limit)
    if args.json:
        _jprint(payload)
        return EXIT_OK
    print(f"tree:   {payload['tree']}")
    print(f"format: {payload['format']}")
    for vid, screen in sorted(payload["screens"].items(), key=lambda kv: int(kv[0])):
        pts = "; ".join(
            f"({','.join(p)}) w={w}" for p, w in zip(screen["points"], screen["weights"])
        )
        print(
            f"screen at vertex {vid} (t-order {screen['t_order']}, "
            f"scale^2 {screen['scale_squared']}): {pts}"
        )
    return EXIT_OK


def cmd_fm_strata(args) -> int:
    weights = _int_list(args.weights)
    try:
        strata = fm_config.enumerate_fm_strata(weights)
    except fm_config.ConfigError as exc:
        raise ValidationFailure(str(exc)) from exc
    if args.json:
        _jprint(
            {
                "schema": 1,
                "weights": weights,
                "count": len(strata),
                "strata": [
                    {
                        "bracket": t.canonical(),
                        "format": fm_config.stratum_format(t),
                    }
                    for t in strata
                ],
            }
        )
        return EXIT_OK
    print(f"{len(strata)} strata for weights {weights}")
    for t in strata:
        print(f"  {t.canonical():<30} {fm_config.stratum_format(t)}")
    return EXIT_OK


def cmd_walls(args) -> int:
    form = _load_form(args.form)
    c = _int_list(args.c)
    wm = _frac_list(getattr(args, "from"))
    wp = _frac_list(args.to)
    try:
        found = wallcross.enumerate_walls(
            form, c, args.p1, wm, wp, collapse_sign=not args.keep_signs
        )
    except wallcross.WallError as exc:
        raise ValidationFailure(str(exc)) from exc
    if args.json:
        _jprint(
            {
                "schema": 1,
                "p1": args.p1,
                "c": c,
                "walls": [
                    {
                        "alpha": list(w.alpha),
                        "alpha_sq": w.alpha_sq,
                        "r": w.r,
                        "d": w.d,
                        "N": w.N,
                        "epsilon": w.epsilon,
                        "t_star": str(w.t_star),
                        "obstructed": w.obstructed,
                    }
                    for w in found.walls
                ],
                "on_wall": [list(a) for a in found.on_wall],
                "search_box": list(found.box),
            }
        )
        return EXIT_OK
    print(f"{len(found.walls)} wall(s) crossed; search box {list(found.box)}")
    print(f"{'alpha':<16} {'alpha^2':>7} {'r':>3} {'d':>3} {'N':>3} {'eps':>4} t*")
    for w in found.walls:
        print(
            f"{str(list(w.alpha)):<16} {w.alpha_sq:>7} {w.r:>3} {w.d:>3} {w.N:>3} "
            f"{w.epsilon:>4} {w.t_star}"
        )
    for a in found.on_wall:
        print(f"on-wall degeneracy (period point lies on the wall): {list(a)}")
    return EXIT_OK


def cmd_delta(args) -> int:
    if (args.chi + args.sigma) % 2:
        raise ValidationFailure("chi + sigma must be even")
    if args.alpha_sq is not None:
        alpha_sq = args.alpha_sq
        alpha: tuple[int, ...] = ()
    elif args.form and args.alpha:
        form = _load_form(args.form)
        alpha = tuple(_int_list(args.alpha))
        alpha_sq_f = form.square(alpha)
        alpha_sq = int(alpha_sq_f)
    else:
        raise ValidationFailure("need --alpha-sq, or --form together with --alpha")
    try:
        r, d, N = wallcross.wall_invariants(alpha_sq, args.p1)
    except wallcross.WallError as exc:
        raise ValidationFailure(str(exc)) from exc
    wall = wallcross.Wall(alpha, alpha_sq, r, d, N, epsilon=1, t_star=Fraction(0))
    levels = {}
    for spec in args.c_level or []:
        try:
            key, val = spec.split("=")
            levels[int(key)] = Fraction(val)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationFailure(f"bad --c-level {spec!r} (want r=value)") from exc
    params = wallcross.DeltaParams(args.chi, args.sigma, levels)
    try:
        delta = wallcross.delta_assemble(wall, args.chi, args.sigma, params)
    except wallcross.ShapeError:
        raise
    except wallcross.WallError as exc:
        raise ValidationFailure(str(exc)) from exc
    if args.json:
        payload = delta.to_json()
        payload.update({"alpha_sq": alpha_sq, "p1": args.p1, "N": N})
        _jprint(payload)
        return EXIT_OK
    print(f"alpha^2 = {alpha_sq}, p1 = {args.p1}:  r = {r}, d = {d}, N = {N}")
    print(f"delta = {delta.text()}")
    return EXIT_OK


def _parse_rules(raw, symbols: dict[str, int]):
    rules = {}
    for entry in raw or []:
        mono = tuple(
            sorted(
                ((GradedSymbol(name, symbols[name]), int(e)) for name, e in entry["monomial"].items()),
                key=lambda kv: kv[0].name,
            )
        )
        value = entry["value"]
        if isinstance(value, str):
            rules[mono] = Fraction(value)
        else:
            from .exact_algebra import poly_from_json

            rules[mono] = poly_from_json(value)
    return rules


def cmd_localize(args) -> int:
    data = _load_json(args.input)
    if data.get("schema") != 1:
        raise ValidationFailure("unsupported schema")
    extra = set(data) - {"schema", "symbols", "loci"}
    if extra:
        raise ValidationFailure(f"unknown fields {sorted(extra)}")
    symbols = {str(k): int(v) for k, v in data.get("symbols", {}).items()}
    loci = []
    known = {"name", "dimension", "restricted", "euler", "rules", "multiplicity"}
    try:
        for entry in data["loci"]:
            extra = set(entry) - known
            if extra:
                raise ValidationFailure(
                    f"locus {entry.get('name', '?')}: unknown fields {sorted(extra)}"
                )
            loci.append(
                localization.FixedLocusDatum(
                    name=str(entry["name"]),
                    dimension=int(entry["dimension"]),
                    restricted_class=laurent_from_json(entry["restricted"]),
                    euler_class=laurent_from_json(entry["euler"]),
                    integration_rules=_parse_rules(entry.get("rules"), symbols),
                    multiplicity=Fraction(entry.get("multiplicity", "1")),
                )
            )
        if args.boundary is not None:
            result = EquivariantLaurent.from_poly(
                localization.boundary_pairing(loci, args.boundary)
            )
        else:
            result = localization.localize_sum(loci, top_degree=args.top_degree)
    except (localization.LocalizationError, KeyError) as exc:
        raise ValidationFailure(str(exc)) from exc
    if args.json:
        _jprint(laurent_to_json(result))
    else:
        print(laurent_to_text(result))
    return EXIT_OK


def cmd_parse(args) -> int:
    if (args.tree is None) == (args.config is None):
        raise ValidationFailure("exactly one of --tree/--config is required")
    try:
        if args.tree is not None:
            t = notation.parse_tree(args.tree)
            if args.json:
                _jprint(t.to_json())
            else:
                print(notation.print_tree(t))
        else:
            cfg = notation.parse_config(args.config)
            print(notation.print_config(cfg))
    except (notation.NotationError, bubble_trees.TreeError) as exc:
        raise ValidationFailure(str(exc)) from exc
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="bubbletree",
        description="bubble-tree strata, flip resolution, configuration limits, "
        "localization residues and wall crossing",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("trees", help="enumerate the stratum trees of charge K")
    p.add_argument("K", type=int)
    p.add_argument("--chi", type=int, default=4)
    p.add_argument("--sigma", type=int, default=0)
    p.add_argument("--hasse", action="store_true")
    p.add_argument("--dot", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_trees)

    p = sub.add_parser("flip", help="run the flip resolution")
    p.add_argument("K", type=int)
    p.add_argument("--chi", type=int, required=True)
    p.add_argument("--sigma", type=int, required=True)
    p.add_argument("--dot", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_flip)

    p = sub.add_parser("fm-limit", help="degeneration limit of a polynomial family")
    p.add_argument("input")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_fm_limit)

    p = sub.add_parser("fm-strata", help="strata of a weighted configuration space")
    p.add_argument("weights", help="comma-separated positive weights, e.g. 1,1,1")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_fm_strata)

    p = sub.add_parser("walls", help="list the walls crossed between two period points")
    p.add_argument("--form", required=True, help="JSON file with the intersection matrix")
    p.add_argument("--c", required=True, help="integral lift of w2, comma-separated")
    p.add_argument("--p1", type=int, required=True)
    p.add_argument("--from", required=True, help="starting period point")
    p.add_argument("--to", required=True, help="ending period point")
    p.add_argument("--keep-signs", action="store_true", help="do not collapse alpha with -alpha")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_walls)

    p = sub.add_parser("delta", help="wall-crossing polynomial for one wall")
    p.add_argument("--p1", type=int, required=True)
    p.add_argument("--chi", type=int, required=True)
    p.add_argument("--sigma", type=int, required=True)
    p.add_argument("--alpha-sq", type=int, default=None)
    p.add_argument("--form", default=None)
    p.add_argument("--alpha", default=None)
    p.add_argument("--c-level", action="append", help="orbifold constant, e.g. 1=1/2")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_delta)

    p = sub.add_parser("localize", help="fixed-point sum for a locus dataset")
    p.add_argument("input")
    p.add_argument("--top-degree", type=int, default=None)
    p.add_argument("--boundary", type=int, default=None, metavar="M",
                   help="compute the boundary pairing at half-dimension M instead")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_localize)

    p = sub.add_parser("parse", help="parse and reprint a tree or configuration")
    p.add_argument("--tree", default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_parse)

    return top


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (bubble_trees.TreeError, fm_config.ConfigError, notation.NotationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (flip_resolution.AuditError, wallcross.ShapeError) as exc:
        print(f"internal audit failure: {exc}", file=sys.stderr)
        return EXIT_AUDIT


if __name__ == "__main__":
    sys.exit(main())
