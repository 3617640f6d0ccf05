"""Command-line interface: ``kunzwalk <subcommand> ...``.

Exit codes: 0 success, 1 a requested verification failed, 2 usage or parse
error, 3 infeasible atom set, 4 internal invariant violation.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import families, plotting
from .geometry import cone_dim, double_description, facet_halfspaces
from .lights import apery_of_generators, circle_of_lights
from .nilsemigroup import (
    InvalidNilsemigroup,
    betti_cone,
    eta,
    is_kunz,
    is_staircase,
    minimal_presentation,
    outer_bettis,
    to_json,
)
from .walk import (
    InfeasibleAtomSet,
    InvariantViolation,
    cross_check_numeric,
    cross_record,
    fan_from_json,
    oracle_keys,
    walk,
    walk_all,
    wall_trade_ok,
)

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_INVARIANT = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def dump_json(data) -> str:
    """The one serializer every JSON writer goes through."""
    return json.dumps(data, indent=1, sort_keys=True) + "\n"


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _rationals(text: str) -> list[Fraction]:
    try:
        return [Fraction(t) for t in text.replace(" ", "").split(",") if t]
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected comma-separated rationals, got {text!r}")


def _vec(v) -> str:
    return "(" + ",".join(map(str, v)) + ")"


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}")


# subcommands

def cmd_walk(args) -> int:
    graph = walk(args.m, args.atoms, seed=args.seed)
    _emit(graph.dumps(), args.out)
    if args.out is not None and len(graph.atoms) in (2, 3):
        plotting.plot_fan(graph.to_json(), Path(args.out).with_suffix(".svg"))
    print(f"{len(graph.chambers)} chambers", file=sys.stderr)
    return EXIT_OK


def cmd_walk_all(args) -> int:
    out_dir = Path(args.out_dir or f"walk_all_m{args.m}_k{args.k}")
    res = walk_all(args.m, args.k, workers=args.workers, seed=args.seed, out_dir=out_dir)
    rows = [s.row() for s in res.summaries]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, ["atoms", "chambers", "max_facets", "max_eta", "infeasible_flag"],
                            lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    (out_dir / "summary.csv").write_text(buf.getvalue())
    hist = res.facet_histogram
    if hist:
        plotting.plot_facet_histogram(hist, f"m = {args.m}, k = {args.k}", out_dir / "facet_histogram.svg")
    print(f"atom sets: {len(rows)}")
    print(f"chambers: {sum(r['chambers'] for r in rows)}")
    print(f"facet histogram: {json.dumps(hist)}")
    print(f"infeasible: {sum(r['infeasible_flag'] for r in rows)}")
    if res.violations:
        for s in res.violations:
            print(f"invariant violation at {list(s.atoms)}: {s.violation}", file=sys.stderr)
        return EXIT_INVARIANT
    status = EXIT_OK
    for name in args.verify or ():
        if name == "oracle":
            bad = [s.atoms for s in res.summaries
                   if s.chambers != len(oracle_keys(args.m, s.atoms))]
        else:
            bound = {"conj-4-facets": 4, "cor-6-facets": 6}[name]
            bad = [s.atoms for s in res.facet_bound_violations(bound)]
        print(f"{'PASS' if not bad else 'FAIL'} {name}: {len(bad)} violations")
        for atoms in bad:
            print(f"  {list(atoms)}")
        if bad:
            status = EXIT_VERIFY
    return status


def analyze_report(n) -> dict:
    report = {"m": n.m, "atoms": list(n.atoms), "violations": list(n.violations)}
    report["valid"] = not n.violations
    if n.violations:
        return report
    kunz = is_kunz(n)
    cone = betti_cone(n)
    rays = double_description(cone)
    facets, _ = facet_halfspaces(cone, rays)
    obs = outer_bettis(n)
    report.update(
        staircase=is_staircase(n),
        outer_bettis=[{"residue": b.residue, "factorizations": [list(z) for z in b.members]} for b in obs],
        rho=len(minimal_presentation(n)),
        beta=len(obs),
        eta=eta(n),
        kunz=kunz,
        cone_dimension=cone_dim(cone),
        irredundant_facets=[list(h) for h in facets],
    )
    return report


def cmd_analyze(args) -> int:
    from .nilsemigroup import from_json

    data = _read_json(args.file)
    try:
        n = from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed nilsemigroup JSON: {exc}")
    report = analyze_report(n)
    if args.json:
        sys.stdout.write(dump_json(report))
        return EXIT_OK
    print(f"m = {report['m']}, atoms = {report['atoms']}")
    if not report["valid"]:
        print("valid: no")
        for v in report["violations"]:
            print(f"  {v}")
        return EXIT_OK
    print("valid: yes")
    print(f"staircase: {'yes' if report['staircase'] else 'no'}")
    print(f"outer Betti elements: {report['beta']}")
    for b in report["outer_bettis"]:
        print(f"  residue {b['residue']}: " + " ".join(_vec(z) for z in b["factorizations"]))
    print(f"|rho'| = {report['rho']}")
    print(f"beta = {report['beta']}")
    print(f"eta = {report['eta']}")
    print("Kunz" if report["kunz"] else "not Kunz")
    print(f"cone dimension: {report['cone_dimension']}")
    print(f"irredundant facets: {len(report['irredundant_facets'])}")
    for h in report["irredundant_facets"]:
        print(f"  {_vec(h)} . x >= 0")
    return EXIT_OK


def cmd_lights(args) -> int:
    if len(args.x) != len(args.atoms):
        raise UsageError(f"need one weight per atom, got {len(args.x)} for {len(args.atoms)}")
    res = circle_of_lights(args.m, args.atoms, args.x)
    _emit(dump_json({
        "y": [str(v) for v in res.y],
        "kunz_subgroup": sorted(res.kunz_subgroup),
        "nilsemigroup": to_json(res.nilsemigroup),
    }), args.out)
    return EXIT_OK


def cmd_apery(args) -> int:
    point, n = apery_of_generators(args.gens)
    print(f"m = {n.m}")
    print("Ap = {" + ",".join(map(str, (0,) + point)) + "}")
    print(f"eta = {eta(n)}")
    if args.nilsemigroup:
        Path(args.nilsemigroup).write_text(dump_json(to_json(n)))
    return EXIT_OK


def cmd_ed3(args) -> int:
    if args.vee:
        if len(args.vee) != 4:
            raise UsageError("--vee takes a,b,c,d")
        try:
            m, p1, p2 = families.vee_filling(*args.vee)
        except families.NoFilling as exc:
            print(f"no filling: {exc}")
            return EXIT_OK
        print(f"m = {m}, p1 = {p1}, p2 = {p2}")
        return EXIT_OK
    if args.m is None:
        raise UsageError("ed3 needs --m or --vee")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["m", "atoms", "shape", "filling", "rays"])
    for atoms in _two_atom_sets(args.m):
        graph = walk(args.m, atoms, seed=args.seed)
        for key in sorted(graph.chambers):
            ch = graph.chambers[key]
            shape = families.shape_of(ch.nilsemigroup)
            writer.writerow([args.m, " ".join(map(str, atoms)), _shape_str(shape),
                             " ".join(map(str, atoms)), " ".join(_vec(r) for r in ch.rays)])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def _two_atom_sets(m: int):
    from .oracles import valid_atom_sets

    return valid_atom_sets(m, 2)


def _shape_str(s) -> str:
    if isinstance(s, families.Diamond):
        return f"diamond({s.a},{s.c})"
    return "vee" + _vec(s.astuple())


def cmd_cup(args) -> int:
    spec = families.CupSpec(args.d)
    h = families.cup_hdescription(spec)
    print(f"m = {spec.m}, atoms = {list(spec.atoms)}")
    print(f"inequalities: {len(h.halfspaces)}")
    for row in h.halfspaces:
        print(f"  {_vec(row)} . x >= 0")
    if args.rays:
        rays = families.cup_rays(spec)
        print(f"rays: {len(rays)}")
        for r in rays:
            print(f"  {_vec(r)}")
    if args.check:
        _, ok = families.cup_cube_check(spec)
        print(f"{'PASS' if ok else 'FAIL'} cube transform")
        return EXIT_OK if ok else EXIT_VERIFY
    return EXIT_OK


def cmd_plot(args) -> int:
    if args.fan:
        fan = _read_json(args.fan)
        try:
            fan_from_json(fan)
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"malformed fan JSON: {exc}")
    else:
        if args.m is None or args.atoms is None:
            raise UsageError("plot needs --fan or both --m and --atoms")
        if len(args.atoms) not in (2, 3):
            raise UsageError(f"plot supports 2 or 3 atoms, got {len(args.atoms)}")
        fan = walk(args.m, args.atoms, seed=args.seed).to_json()
    if len(fan["atoms"]) not in (2, 3):
        raise UsageError(f"plot supports 2 or 3 atoms, got {len(fan['atoms'])}")
    out = args.out or f"fan_m{fan['m']}_" + "-".join(map(str, fan["atoms"])) + ".svg"
    plotting.plot_fan(fan, out)
    print(out)
    return EXIT_OK


def cmd_verify(args) -> int:
    graph = walk(args.m, args.atoms, seed=args.seed)
    checks: list[tuple[str, bool]] = []
    if args.m <= args.oracle_max_m:
        checks.append(("oracle chamber set", set(graph.chambers) == oracle_keys(args.m, graph.atoms)))
    involution = numeric = walls = True
    for ch in graph.chambers.values():
        for f in ch.facets:
            if f.kind != "interior":
                continue
            other = cross_record(ch, f)
            back = [g for g in graph.chambers[other.key].facets if g.neighbor == ch.key]
            involution &= len(back) == 1 and cross_record(graph.chambers[other.key], back[0]).key == ch.key
            numeric &= cross_check_numeric(ch, f, other)
            walls &= wall_trade_ok(ch, f)
    checks += [("crossing is an involution", involution),
               ("numeric crossing agrees", numeric),
               ("one inner Betti element per wall", walls)]
    print(f"{len(graph.chambers)} chambers")
    for name, ok in checks:
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    return EXIT_OK if all(ok for _, ok in checks) else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kunzwalk", description="Chambers of Kunz fans by facet walking.")
    sub = p.add_subparsers(dest="command", required=True)

    def seeded(q):
        q.add_argument("--seed", type=int, default=0, help="perturbation seed (default 0)")
        return q

    q = seeded(sub.add_parser("walk", help="enumerate the chambers of G(m;A)"))
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--atoms", type=_ints, required=True)
    q.add_argument("--out", help="FanGraph JSON path (an SVG is written next to it for 2 or 3 atoms)")
    q.set_defaults(func=cmd_walk)

    q = seeded(sub.add_parser("walk-all", help="walk every k-atom set of Z_m"))
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--workers", type=int, default=1)
    q.add_argument("--out-dir")
    q.add_argument("--verify", action="append", choices=["conj-4-facets", "cor-6-facets", "oracle"])
    q.set_defaults(func=cmd_walk_all)

    q = sub.add_parser("analyze", help="report on a nilsemigroup JSON file")
    q.add_argument("file")
    q.add_argument("--json", action="store_true", help="machine-readable output")
    q.set_defaults(func=cmd_analyze)

    q = sub.add_parser("lights", help="circle of lights at a weight vector")
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--atoms", type=_ints, required=True)
    q.add_argument("--x", type=_rationals, required=True, help="one positive weight per atom")
    q.add_argument("--out")
    q.set_defaults(func=cmd_lights)

    q = sub.add_parser("apery", help="Apéry set of a numerical semigroup")
    q.add_argument("--gens", type=_ints, required=True)
    q.add_argument("--nilsemigroup", help="also write the Kunz nilsemigroup JSON here")
    q.set_defaults(func=cmd_apery)

    q = seeded(sub.add_parser("ed3", help="shapes of 2-atom chambers"))
    q.add_argument("--m", type=int)
    q.add_argument("--vee", type=_ints, help="a,b,c,d: print the filling of this V shape")
    q.add_argument("--out", help="CSV path")
    q.set_defaults(func=cmd_ed3)

    q = sub.add_parser("cup", help="cup poset chamber")
    q.add_argument("--d", type=int, required=True)
    q.add_argument("--rays", action="store_true")
    q.add_argument("--check", action="store_true", help="verify the cube transform")
    q.set_defaults(func=cmd_cup)

    q = seeded(sub.add_parser("plot", help="SVG of a fan with 2 or 3 atoms"))
    q.add_argument("--m", type=int)
    q.add_argument("--atoms", type=_ints)
    q.add_argument("--fan", help="FanGraph JSON to draw instead of walking")
    q.add_argument("--out")
    q.set_defaults(func=cmd_plot)

    q = seeded(sub.add_parser("verify", help="cross-check one walk"))
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--atoms", type=_ints, required=True)
    q.add_argument("--oracle-max-m", type=int, default=13,
                   help="compare with brute force when m is at most this (default 13)")
    q.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleAtomSet as exc:
        print(f"infeasible atom set: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except InvariantViolation as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (UsageError, InvalidNilsemigroup, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
