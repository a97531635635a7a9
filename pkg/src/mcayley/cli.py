"""Command-line front end: build, aut, check, census and repro.

Exit codes: 0 the property holds (or the command succeeded), 1 it fails,
2 bad input, 3 an element, vertex or time bound was hit.

A digraph argument is either a connection-set JSON file or a fixture id
(``F2``, ``cyclic-gadget(7)``, ``dir-cycle(2,2)``).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any

from .aut import VertexBoundError, aut_mcayley
from .ci import check_mCI_babai, check_mCI_direct, check_mPCI_babai, check_mPCI_direct
from .digraph import (
    MCayleyDigraph,
    ModeError,
    block_components,
    build,
    is_pcayley_mode,
    load_connection_sets,
    weak_components,
)
from .groups import GroupError
from .normalizer import filtered_subgroups
from .perms import ElementBoundError, cycles, right_regular
from .repro.census import (
    BudgetExceeded,
    CensusError,
    CensusUnsupported,
    ShardSpec,
    census,
    run_shard,
)
from .repro.fixtures import FIXTURE_IDS, UnknownFixture, fixture, run_fixture
from .repro.table1 import verify_table1
from .repro.theorems import verify_small_theorems

HOLDS, FAILS, BAD_INPUT, BOUND = 0, 1, 2, 3


class InputError(Exception):
    pass


def _emit(args: argparse.Namespace, data: dict[str, Any], lines: list[str]) -> None:
    if args.format == "json":
        print(json.dumps(data, sort_keys=True, indent=2))
    else:
        for line in lines:
            print(line)


def _load(source: str, mode: str | None = None) -> MCayleyDigraph:
    if os.path.exists(source):
        conn, file_mode = load_connection_sets(source)
        return build(conn, mode or file_mode)
    try:
        fx = fixture(source)
    except UnknownFixture:
        raise InputError(f"{source}: no such file or fixture") from None
    gamma = fx.build()
    return build(gamma.conn, mode) if mode else gamma


def _load_partner(source: str, gamma_source: str) -> MCayleyDigraph:
    if source == "partner":
        try:
            return fixture(gamma_source).build_partner()
        except (UnknownFixture, ValueError) as exc:
            raise InputError(f"{gamma_source}: no partner digraph ({exc})") from None
    return _load(source)


def _cycle_text(p: tuple[int, ...]) -> str:
    cyc = [c for c in cycles(p) if len(c) > 1]
    return "".join("(" + " ".join(map(str, c)) + ")" for c in cyc) or "()"


def cmd_build(args: argparse.Namespace) -> int:
    gamma = _load(args.source, args.mode)
    weak = weak_components(gamma).blocks
    blocks = block_components(gamma)
    data = {
        "vertices": gamma.n,
        "arcs": gamma.arc_count(),
        "mode": gamma.mode,
        "weak_components": len(weak),
        "block_components": blocks,
    }
    if args.out:
        path = Path(args.out)
        if path.suffix == ".dimacs":
            path.write_text(gamma.to_dimacs())
        else:
            path.write_text(json.dumps(gamma.to_json(), sort_keys=True) + "\n")
        data["written"] = str(path)
    lines = [
        f"{gamma.n} vertices, {gamma.arc_count()} arcs",
        f"weak components: {len(weak)}",
        "block components: " + " ".join("{" + ",".join(str(i + 1) for i in b) + "}" for b in blocks),
    ]
    if args.out:
        lines.append(f"wrote {args.out}")
    _emit(args, data, lines)
    return HOLDS


def cmd_aut(args: argparse.Namespace) -> int:
    gamma = _load(args.source)
    aut = aut_mcayley(gamma)
    data: dict[str, Any] = {
        "aut_order": aut.order,
        "generators": [list(p) for p in aut.generators],
    }
    lines = [f"|Aut| = {aut.order}"]
    lines += [f"  {_cycle_text(p)}" for p in aut.generators]
    if args.parts_fixed:
        fixed = aut_mcayley(gamma, "fixed")
        data["aut_parts_fixed_order"] = fixed.order
        lines.append(f"|Aut_(parts)| = {fixed.order}")
    if args.normalizer:
        orders = filtered_subgroups(gamma).orders()
        data["normalizer"] = {k: orders[k] for k in ("N_tilde", "C_tilde", "K_tilde")}
        lines.append(
            f"|N~| = {orders['N_tilde']}, |C~| = {orders['C_tilde']}, |K~| = {orders['K_tilde']}"
        )
    _emit(args, data, lines)
    return HOLDS


def cmd_check(args: argparse.Namespace) -> int:
    gamma = _load(args.source)
    pci = args.property == "mpci"
    if pci and not is_pcayley_mode(gamma.mode) and any(gamma.conn.sets[i][i] for i in range(gamma.m)):
        raise InputError("mpci needs an m-PCayley digraph (empty diagonal sets)")
    if args.against:
        sigma = _load_partner(args.against, args.source)
        report = check_mPCI_direct(gamma, sigma) if pci else check_mCI_direct(gamma, sigma)
    elif pci:
        report = check_mPCI_babai(gamma, route=args.route)
    else:
        report = check_mCI_babai(gamma)
    data = report.to_json(timing=False)
    lines = [f"{report.property}: {'holds' if report.verdict else 'fails'}"]
    if report.vacuous:
        lines[0] += " (vacuous)"
    stats = report.stats
    if "subgroups_enumerated" in stats:
        lines.append(
            f"semiregular subgroups: {stats['subgroups_enumerated']}, "
            f"class of R(G): {stats['class_size_of_R']}, route: {stats['route']}"
        )
    w = report.witness or {}
    if w.get("kind") == "non-conjugate":
        ref = right_regular(gamma.group, gamma.m).generators
        lines.append("R(G): " + " ".join(_cycle_text(p) for p in ref))
        lines.append("non-conjugate: " + " ".join(_cycle_text(tuple(p)) for p in w["subgroup"]["generators"]))
    elif w.get("kind") == "normalizer-element":
        lines.append(f"normalizer element: {w['element']}")
    lines += [f"note: {n}" for n in report.notes]
    _emit(args, data, lines)
    return HOLDS if report.verdict else FAILS


def cmd_census(args: argparse.Namespace) -> int:
    directory = args.dir
    os.makedirs(directory, exist_ok=True)
    if args.shard:
        spec = ShardSpec.parse(args.shard)
        summary = run_shard(
            args.group, args.m, args.mode, spec, directory,
            resume=args.resume, budget_s=args.budget_s, long_run=args.long_run,
        )
        _emit(args, summary, [f"shard {spec.k}/{spec.n} of {args.group} m={args.m} {args.mode}: complete"])
        return HOLDS
    shards = args.shards or max(1, args.workers)
    result = census(
        args.group, args.m, args.mode, shards=shards, workers=args.workers,
        directory=directory, resume=args.resume, budget_s=args.budget_s, long_run=args.long_run,
    )
    _emit(args, result.to_json(), [result.summary_line()])
    return HOLDS if result.aggregate else FAILS


def _fixture_lines(report: Any) -> list[str]:
    head = f"{report.id} {report.name}: " + (
        "all expectations reproduced" if report.passed else f"{len(report.failures())} mismatches"
    )
    lines = [head]
    for c in report.checks:
        lines.append(f"  {'PASS' if c.ok else 'FAIL'} {c.name}: {c.actual} (expected {c.expected})")
    return lines


def cmd_repro(args: argparse.Namespace) -> int:
    target = args.target
    data: dict[str, Any] = {}
    lines: list[str] = []
    ok = True
    if target in ("all", "table1"):
        t = verify_table1()
        data["table1"] = t.to_json()
        lines += t.lines()
        ok &= t.passed
    if target in ("all", "theorems"):
        th = verify_small_theorems()
        data["theorems"] = th.to_json()
        lines += th.lines()
        ok &= th.passed
    if target == "all":
        ids = FIXTURE_IDS
    elif target in ("table1", "theorems"):
        ids = ()
    else:
        ids = (target,)
    for fid in ids:
        try:
            fx = fixture(fid, k=args.k, p=args.p, r=args.r)
        except UnknownFixture:
            raise InputError(f"unknown fixture {fid!r}") from None
        fr = run_fixture(fx)
        data.setdefault("fixtures", {})[fr.name] = fr.to_json(timing=False)
        lines += _fixture_lines(fr)
        ok &= fr.passed
    _emit(args, data, lines)
    return HOLDS if ok else FAILS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mcayley", description=__doc__.splitlines()[0])
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument("--element-bound", type=int, help="largest group to enumerate element by element")
    parser.add_argument("--aut-bound", type=int, help="largest vertex count for automorphism searches")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a digraph and summarize it")
    p.add_argument("source")
    p.add_argument("--mode", help="override the mode stored in the file")
    p.add_argument("--out", help="write the arc list (.json) or a DIMACS file (.dimacs)")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("aut", help="automorphism group orders and generators")
    p.add_argument("source")
    p.add_argument("--parts-fixed", action="store_true", help="also the subgroup fixing every part")
    p.add_argument("--normalizer", action="store_true", help="also |N~|, |C~| and |K~|")
    p.set_defaults(func=cmd_aut)

    p = sub.add_parser("check", help="decide mCI or mPCI for one digraph")
    p.add_argument("source")
    p.add_argument("--property", choices=("mci", "mpci"), required=True)
    p.add_argument("--against", help="a second digraph (or 'partner') for the direct check")
    p.add_argument("--route", choices=("auto", "elements", "parts", "count"), default="auto")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("census", help="check every instance of a small instance space")
    p.add_argument("group")
    p.add_argument("m", type=int)
    p.add_argument("mode")
    p.add_argument("--shard", help="run only shard k/n")
    p.add_argument("--shards", type=int, help="number of shards (default: workers)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--resume", action="store_true")
    p.add_argument("--budget-s", type=float)
    p.add_argument("--long-run", action="store_true", help="allow spaces above 2^16 instances")
    p.add_argument("--dir", default="census-out", help="directory for shard files")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("repro", help="rerun a fixture, table1, theorems or all")
    p.add_argument("target")
    p.add_argument("--k", type=int, default=5, help="k for cyclic-gadget")
    p.add_argument("--p", type=int, default=2, help="p for dir-cycle")
    p.add_argument("--r", type=int, default=2, help="r for dir-cycle")
    p.set_defaults(func=cmd_repro)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    # flags win over the environment, for this call only; census workers
    # inherit the variables
    overrides = {
        "MCAYLEY_BOUND_ELEMENTS": args.element_bound,
        "MCAYLEY_BOUND_AUT": args.aut_bound,
    }
    saved = {k: os.environ.get(k) for k in overrides}
    for k, v in overrides.items():
        if v is not None:
            os.environ[k] = str(v)
    try:
        return args.func(args)
    except (ElementBoundError, VertexBoundError, BudgetExceeded, CensusUnsupported) as exc:
        print(f"bound: {exc}", file=sys.stderr)
        return BOUND
    except (InputError, ModeError, GroupError, CensusError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT
    finally:
        for k, old in saved.items():
            if old is None:
                os.environ.pop(k, None)
            else:
                os.environ[k] = old


if __name__ == "__main__":
    sys.exit(main())
