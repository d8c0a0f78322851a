"""Command line front end: ``kplane verify | list-families | emit-example``.

Exit codes: 0 every check passed, 1 some check failed, 2 usage or scenario
error, 3 internal error.
"""

from __future__ import annotations

import argparse
import sys
import traceback

from . import __version__
from .errors import ScenarioError
from .manifold import FAMILIES, product
from .scenario import (
    _EXAMPLES,
    dump_scenario,
    emit_report,
    example_scenario,
    load_scenario,
    run_scenario,
    validate_scenario,
    scenario_to_dict,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kplane", description="Verify extension / k-plane transform identities on scenario files.")
    p.add_argument("--version", action="version", version=f"kplane {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run every check of a scenario file")
    v.add_argument("scenario", help="path to a scenario JSON file")
    v.add_argument("--format", choices=("json", "table"), default="json")
    v.add_argument("--out", default=None, help="write the report here instead of stdout")
    v.add_argument("--quad-order", type=int, default=None, help="Gauss-Legendre nodes per parameter axis")
    v.add_argument("--trunc-radius", type=float, default=None, help="plane truncation radius R")
    v.add_argument("--grid-res", type=int, default=None, help="grid resolution of the transversality checks")

    sub.add_parser("list-families", help="print the known manifold families")

    e = sub.add_parser("emit-example", help="print a canonical scenario for a family")
    e.add_argument("family")
    return p


def _apply_overrides(s, args):
    doc = scenario_to_dict(s)
    if args.quad_order is not None:
        doc["quadrature"]["order"] = args.quad_order
    if args.trunc_radius is not None:
        doc["quadrature"]["plane_trunc_radius"] = args.trunc_radius
    if args.grid_res is not None:
        doc["grid_res"] = args.grid_res
    return validate_scenario(doc)


def _verify(args) -> int:
    try:
        s = load_scenario(args.scenario)
        s = _apply_overrides(s, args)
    except ScenarioError as exc:
        sys.stderr.write(f"kplane: {type(exc).__name__} at {exc.path}: {exc}\n")
        return EXIT_USAGE
    report = run_scenario(s)
    try:
        emit_report(report, args.format, args.out)
    except OSError as exc:
        sys.stderr.write(f"kplane: cannot write report: {exc}\n")
        return EXIT_USAGE
    return EXIT_OK if report["overall_pass"] else EXIT_FAIL


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return _verify(args)
        if args.command == "list-families":
            for name in sorted(FAMILIES):
                fn = FAMILIES[name] or product
                doc = (fn.__doc__ or "").strip().splitlines()
                sys.stdout.write(f"{name:<12}{doc[0] if doc else ''}\n")
            return EXIT_OK
        if args.command == "emit-example":
            if args.family not in _EXAMPLES:
                sys.stderr.write(f"kplane: unknown family {args.family!r}; try list-families\n")
                return EXIT_USAGE
            sys.stdout.write(dump_scenario(example_scenario(args.family)))
            return EXIT_OK
    except Exception:  # noqa: BLE001
        traceback.print_exc()
        return EXIT_INTERNAL
    return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
