"""diagram, query and dump-overlay commands"""
import argparse

from ..diagram import brute_force_diagram, fast_diagram, locate
from ..io import diagram_dump, overlay_dump, write_json
from ..overlay import build_overlay
from ..prefix_cells import build_prefix_cells
from .common import add_instance_arguments, instance_from_args, point


def register(subparsers):
    diagram = subparsers.add_parser("diagram", help="weighted diagram vertices of one instance")
    add_instance_arguments(diagram)
    diagram.add_argument("--oracle", action="store_true", help="use the brute-force oracle")
    diagram.set_defaults(func=diagram_command)

    query = subparsers.add_parser("query", help="weighted nearest site through the candidate sets")
    add_instance_arguments(query)
    query.add_argument("--point", type=point, action="append", required=True,
                       help="query point x,y (repeatable; write --point=-1,2 when x is negative)")
    query.set_defaults(func=query_command)

    dump = subparsers.add_parser("dump-overlay", help="overlay arrangement of one instance as JSON")
    add_instance_arguments(dump)
    dump.set_defaults(func=dump_overlay_command)


def diagram_command(args: argparse.Namespace) -> int:
    ord = instance_from_args(args)
    D = brute_force_diagram(ord) if args.oracle else fast_diagram(ord, args.box_factor)
    text = write_json(diagram_dump(D, args.seed, args.model), args.out)
    if args.out:
        print(f"{D.provenance} diagram: V={D.counts.V} ({D.near_degenerate} near-degenerate), written to {args.out}")
    else:
        print(text, end="")
    return 0


def query_command(args: argparse.Namespace) -> int:
    ord = instance_from_args(args)
    A = build_overlay(build_prefix_cells(ord, args.box_factor))
    for x in args.point:
        result = locate(x, A, ord)
        candidates = ",".join(map(str, result.candidates.ranks))
        print(f"{x.x:g},{x.y:g} rank={result.rank} value={result.value:.12g} candidates={candidates}")
    return 0


def dump_overlay_command(args: argparse.Namespace) -> int:
    ord = instance_from_args(args)
    A = build_overlay(build_prefix_cells(ord, args.box_factor))
    text = write_json(overlay_dump(A, args.seed, args.model), args.out)
    if args.out:
        c = A.complexity
        print(f"overlay: V={c.V} E={c.E} F={c.F} total={c.total}, written to {args.out}")
    else:
        print(text, end="")
    return 0
