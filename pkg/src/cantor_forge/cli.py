"""Command-line front end.

Exit codes: 0 ok, 1 a checked property failed, 2 malformed input, 3 I/O error.
Set ``CANTOR_FORGE_LOG`` to ``quiet``, ``info`` or ``debug`` for log verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Callable, Sequence

from .analyzer import rank_report
from .constructions import (
    construct_G,
    construct_H,
    construct_K,
    construct_Km,
    realize,
    symbolic_G,
    symbolic_H,
    symbolic_K,
    symbolic_Km,
)
from .intervals import IntervalSet
from .oracles import OracleSpec, TargetSet
from .plotting import NumberLine, ascii_line, render_svg, tree_picture
from .tree import Tree, dumps_tree, tree_from_json
from .verify import SUITES, report, run_suite

log = logging.getLogger("cantor_forge")

EXIT_OK, EXIT_PROPERTY, EXIT_SCHEMA, EXIT_IO = 0, 1, 2, 3

_LEVELS = {"quiet": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}


class SchemaError(Exception):
    pass


class IOProblem(Exception):
    pass


# -- file helpers -------------------------------------------------------------


def _read_json(path: str) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IOProblem(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not JSON ({exc.msg} at line {exc.lineno})") from exc


def _parse(path: str, loader: Callable[[Any], Any]) -> Any:
    payload = _read_json(path)
    try:
        return loader(payload)
    except (ValueError, KeyError, TypeError) as exc:
        raise SchemaError(f"{path}: {exc}") from exc


def _check_out(path: str | None) -> None:
    if path is None:
        return
    parent = Path(path).resolve().parent
    if not parent.is_dir():
        raise IOProblem(f"output directory {parent} does not exist")


def _check_in(path: str | None) -> None:
    if path is not None and not Path(path).is_file():
        raise IOProblem(f"input file {path} does not exist")


def _write_text(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IOProblem(f"cannot write {path}: {exc.strerror or exc}") from exc


def dumps(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def load_tree(path: str) -> Tree:
    def loader(payload: Any) -> Tree:
        if not isinstance(payload, dict):
            raise ValueError("tree file must hold a JSON object")
        return tree_from_json(payload.get("tree", payload))

    return _parse(path, loader)


def load_set(path: str) -> IntervalSet:
    return _parse(path, IntervalSet.from_json)


# -- subcommands ----------------------------------------------------------------


def _construction_inputs(args: argparse.Namespace) -> tuple[OracleSpec | None, TargetSet | None]:
    oracle = _parse(args.oracle, OracleSpec.from_json) if args.oracle else None
    target = _parse(args.target, TargetSet.from_json) if args.target else None
    need = "target" if args.set in ("Km", "K") else "oracle"
    if (need == "target" and target is None) or (need == "oracle" and oracle is None):
        raise SchemaError(f"--set {args.set} needs --{need}")
    if args.set == "G" and oracle.depth != 1:
        raise SchemaError(f"G needs a depth-1 oracle, got depth {oracle.depth}")
    if args.set == "H" and oracle.depth != args.m:
        raise SchemaError(f"H_{args.m} needs a depth-{args.m} oracle, got depth {oracle.depth}")
    return oracle, target


def cmd_construct(args: argparse.Namespace) -> int:
    _check_in(args.oracle)
    _check_in(args.target)
    _check_out(args.out)
    oracle, target = _construction_inputs(args)
    if args.symbolic:
        tree = {
            "G": lambda: symbolic_G(oracle),
            "H": lambda: symbolic_H(oracle, args.m),
            "Km": lambda: symbolic_Km(target, args.m),
            "K": lambda: symbolic_K(target),
        }[args.set]()
        text = dumps_tree(tree) + "\n"
        if args.out:
            _write_text(args.out, text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    if args.stage is None:
        raise SchemaError("--stage is required unless --symbolic is given")
    result = {
        "G": lambda: construct_G(oracle, args.stage),
        "H": lambda: construct_H(oracle, args.m, args.stage),
        "Km": lambda: construct_Km(target, args.m, args.stage),
        "K": lambda: construct_K(target, args.stage),
    }[args.set]()
    log.info("constructed %s at stage %d", args.set, args.stage)
    if args.out:
        _write_text(args.out, dumps(result.to_json()))
    print(f"components\t{len(result)}")
    print(f"measure\t{result.measure()}")
    return EXIT_OK


def cmd_realize(args: argparse.Namespace) -> int:
    _check_in(args.tree)
    _check_out(args.out)
    result = realize(load_tree(args.tree), args.depth)
    text = dumps(result.to_json())
    if args.out:
        _write_text(args.out, text)
        print(f"components\t{len(result)}")
        print(f"measure\t{result.measure()}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_rank(args: argparse.Namespace) -> int:
    _check_in(args.tree)
    _check_out(args.out)
    _check_out(args.svg)
    tree = load_tree(args.tree)
    rep = rank_report(tree, args.truncate, listing=args.depth)
    if args.out:
        _write_text(args.out, dumps(rep.to_json()))
    if args.json:
        sys.stdout.write(dumps(rep.to_json()))
    else:
        print(rep.table())
    if args.svg:
        depth = args.truncate if args.depth is None else args.depth
        _render(tree_picture(tree, depth, args.truncate, title=f"rho = {sorted(rep.rho)}"), args.svg)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    _check_out(args.out)
    checks = run_suite(args.suite, seed=args.seed, truncate=args.truncate)
    text = report(checks) + "\n"
    sys.stdout.write(text)
    if args.out:
        _write_text(args.out, text)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_PROPERTY


def cmd_render(args: argparse.Namespace) -> int:
    _check_in(args.tree)
    _check_in(args.set)
    _check_out(args.svg)
    if args.tree:
        picture = tree_picture(load_tree(args.tree), args.depth, args.truncate)
    else:
        picture = NumberLine(load_set(args.set))
    if args.svg:
        _render(picture, args.svg)
    if args.ascii or not args.svg:
        print(ascii_line(picture.intervals))
    return EXIT_OK


def _render(picture: NumberLine, path: str) -> None:
    try:
        with open(path, "wb") as fh:
            render_svg(picture, fh)
    except OSError as exc:
        raise IOProblem(f"cannot write {path}: {exc.strerror or exc}") from exc
    log.info("wrote %s", path)


# -- argument parsing ---------------------------------------------------------------


def _natural(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 0:
        raise argparse.ArgumentTypeError("bounds must be >= 0")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cantor-forge", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build a staged set (or its symbolic tree)")
    c.add_argument("--set", required=True, choices=["G", "H", "Km", "K"])
    c.add_argument("--oracle", help="oracle JSON (G, H)")
    c.add_argument("--target", help="target-set JSON (Km, K)")
    c.add_argument("--m", type=_natural, default=1, help="level for H and Km")
    c.add_argument("--stage", type=_natural)
    c.add_argument("--symbolic", action="store_true", help="write the cascade tree instead of a stage")
    c.add_argument("--out", help="output JSON path")
    c.set_defaults(run=cmd_construct)

    r = sub.add_parser("realize", help="realize a tree file at a schedule depth")
    r.add_argument("--tree", required=True)
    r.add_argument("--depth", type=_natural, required=True)
    r.add_argument("--out")
    r.set_defaults(run=cmd_realize)

    k = sub.add_parser("rank", help="components, ranks and rho of a tree file")
    k.add_argument("--tree", required=True)
    k.add_argument("--truncate", type=_natural, default=8, help="largest rank reported in rho")
    k.add_argument("--depth", type=_natural, help="listing depth (default: --truncate)")
    k.add_argument("--out", help="write the report JSON here")
    k.add_argument("--json", action="store_true", help="print JSON instead of the table")
    k.add_argument("--svg", help="also draw the number line here")
    k.set_defaults(run=cmd_rank)

    v = sub.add_parser("verify", help="run a property suite")
    v.add_argument("--suite", required=True, choices=SUITES)
    v.add_argument("--truncate", type=_natural, default=6)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out", help="also write the TSV report here")
    v.set_defaults(run=cmd_verify)

    d = sub.add_parser("render", help="draw a tree or interval set")
    src = d.add_mutually_exclusive_group(required=True)
    src.add_argument("--tree")
    src.add_argument("--set")
    d.add_argument("--svg", help="SVG output path")
    d.add_argument("--ascii", action="store_true", help="print a text rendering as well")
    d.add_argument("--depth", type=_natural, default=6)
    d.add_argument("--truncate", type=_natural, default=8)
    d.set_defaults(run=cmd_render)
    return p


def _configure_logging() -> None:
    name = os.environ.get("CANTOR_FORGE_LOG", "quiet").lower()
    logging.basicConfig(level=_LEVELS.get(name, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    if name not in _LEVELS:
        log.warning("unknown CANTOR_FORGE_LOG value %r; using quiet", name)


def main(argv: Sequence[str] | None = None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except IOProblem as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
