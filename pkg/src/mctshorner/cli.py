"""Command-line interface: ``mctshorner count|optimize|sweep|generate``.

Exit codes: 0 success, 2 usage error, 3 parse error, 4 resource cap.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
import time
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from .cost import CostEvaluator
from .emit import StatsReport, emit_c_like, emit_stats, emit_tac, sweep_csv
from .expr import ParseError, Polynomial, Workspace, format_polynomial, naive_op_count, parse_polynomial
from .gen import CACHE_ENV, ResourceLimitError, cached_resultant, structured_random
from .horner import horner_transform, tree_op_count
from .search import (
    Direction,
    MctsConfig,
    SearchResult,
    evaluate_order,
    exhaustive_search,
    mcts_optimize,
    occurrence_order,
    random_order_search,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_RESOURCE = 4

METHODS = ("occurrence", "random", "mcts", "exhaustive", "given-order")
EXHAUSTIVE_MAX_VARS = 9


class UsageError(Exception):
    pass


def _floats(text: str) -> List[float]:
    try:
        vals = [float(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number list: {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _ints(text: str) -> List[int]:
    try:
        vals = [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer list: {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _add_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", nargs="?", help="polynomial file ('-' for stdin)")
    p.add_argument("-e", "--expr", help="inline polynomial instead of a file")
    p.add_argument("--out", help="write output here instead of stdout")


def _add_search(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mcts-n", type=int, default=1000, help="tree expansions (default 1000)")
    p.add_argument("--cp", type=float, default=1.0, help="exploration constant (default 1.0)")
    p.add_argument(
        "--direction",
        choices=[d.value for d in Direction],
        help="default: front for generated resultants, back otherwise",
    )
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mctshorner", description="Horner scheme optimization with tree search.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="naive operation count of a polynomial")
    _add_input(p)

    p = sub.add_parser("optimize", help="choose a Horner order, apply CSE and emit code")
    _add_input(p)
    p.add_argument("--method", choices=METHODS, default="mcts")
    p.add_argument("--order", help="comma-separated variable order for given-order")
    _add_search(p)
    p.add_argument("--samples", type=int, help="orders to draw for --method random (default: --mcts-n)")
    p.add_argument("--format", choices=("tac", "c", "json"), default="tac")
    p.add_argument("--name", default="poly", help="function name for --format c")
    p.add_argument("--stats", help="also write the JSON stats here")
    p.add_argument("--timing", action="store_true", help="include wall time in stats (not reproducible)")

    p = sub.add_parser("sweep", help="best totals over a grid of cp, N and seeds, as CSV")
    _add_input(p)
    p.add_argument("--sweep-cp", type=_floats, required=True, metavar="LIST")
    p.add_argument("--sweep-n", type=_ints, required=True, metavar="LIST")
    p.add_argument("--seeds", type=int, default=1, help="seeds 0..k-1 per cell")
    p.add_argument("--direction", choices=[d.value for d in Direction])

    p = sub.add_parser("generate", help="write a benchmark polynomial")
    gsub = p.add_subparsers(dest="kind", required=True)
    g = gsub.add_parser("resultant")
    g.add_argument("m", type=int)
    g.add_argument("n", type=int)
    g.add_argument("--out")
    g = gsub.add_parser("structured")
    g.add_argument("--vars", type=int, default=6)
    g.add_argument("--terms", type=int, default=30)
    g.add_argument("--degree", type=int, default=4)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    return ap


def _read_input(args) -> Tuple[str, str]:
    """Return (text, label) where label is what gets echoed in configs."""
    if args.expr is not None:
        if args.input is not None:
            raise UsageError("give either an input file or --expr, not both")
        return args.expr, "<expr>"
    if args.input is None:
        raise UsageError("no input: give a file or --expr")
    if args.input == "-":
        return sys.stdin.read(), "<stdin>"
    try:
        return Path(args.input).read_text(encoding="utf-8"), args.input
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc.strerror}") from None


def _natural_key(name: str):
    return [(0, int(tok), "") if tok.isdigit() else (1, 0, tok) for tok in re.findall(r"\d+|\D+", name)]


def _parse(text: str) -> Tuple[Polynomial, Workspace]:
    """Parse with variable ids in natural name order (a2 < a10), not text order.

    Ids decide canonical child order and therefore what CSE can share, so a
    file must not cost differently just because its terms were printed in
    another order.
    """
    scratch = Workspace()
    parse_polynomial(text, scratch)
    ws = Workspace(sorted((v.name for v in scratch.variables), key=_natural_key))
    return parse_polynomial(text, ws), ws


def _default_direction(text: str) -> Direction:
    # generated resultants do better with the tree fixing the outer variables
    first = text.lstrip().split("\n", 1)[0]
    return Direction.FRONT if first.startswith("# resultant") else Direction.BACK


def _write(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _cmd_count(args) -> int:
    text, label = _read_input(args)
    p, _ws = _parse(text)
    report = StatsReport(naive=naive_op_count(p), config={"command": "count", "input": label})
    _write(args, emit_stats(report))
    return EXIT_OK


def _given_order(p: Polynomial, ws: Workspace, text: Optional[str]):
    if not text:
        raise UsageError("--method given-order needs --order")
    names = [s.strip() for s in text.split(",") if s.strip()]
    if len(set(names)) != len(names):
        raise UsageError("--order has duplicates")
    unknown = [n for n in names if n not in ws]
    if unknown:
        raise UsageError(f"--order names unknown variables: {', '.join(unknown)}")
    order = [ws[n] for n in names]
    missing = set(p.variables) - set(order)
    if missing:
        raise UsageError(f"--order is missing {', '.join(sorted(v.name for v in missing))}")
    # variables absent from the polynomial are harmless; drop them
    return tuple(v for v in order if v in set(p.variables))


def _cmd_optimize(args) -> int:
    text, label = _read_input(args)
    p, ws = _parse(text)
    direction = Direction(args.direction) if args.direction else _default_direction(text)
    config = {
        "command": "optimize",
        "input": label,
        "method": args.method,
        "format": args.format,
    }
    if args.mcts_n < 1:
        raise UsageError("--mcts-n must be >= 1")
    if args.cp <= 0:
        raise UsageError("--cp must be positive")
    if not 0 <= args.seed < 2**64:
        raise UsageError("--seed must fit in 64 unsigned bits")
    started = time.perf_counter()
    result: Optional[SearchResult]
    if p.is_zero or not p.variables:
        # nothing to order: a constant
        result = evaluate_order(p, ())
    elif args.method == "given-order":
        order = _given_order(p, ws, args.order)
        config["order"] = [v.name for v in order]
        result = evaluate_order(p, order)
    elif args.method == "occurrence":
        result = evaluate_order(p, occurrence_order(p))
    elif args.method == "exhaustive":
        if len(p.variables) > EXHAUSTIVE_MAX_VARS:
            raise ResourceLimitError(
                f"exhaustive search over {len(p.variables)} variables exceeds the cap of {EXHAUSTIVE_MAX_VARS}"
            )
        result = exhaustive_search(p, max_vars=EXHAUSTIVE_MAX_VARS)
    elif args.method == "random":
        samples = args.samples if args.samples is not None else args.mcts_n
        if samples < 1:
            raise UsageError("--samples must be >= 1")
        config.update(samples=samples, seed=args.seed)
        result, _hist = random_order_search(p, samples, seed=args.seed)
    else:
        cfg = MctsConfig(expansions=args.mcts_n, cp=args.cp, direction=direction, seed=args.seed)
        config.update(mcts_n=cfg.expansions, cp=cfg.cp, direction=cfg.direction.value, seed=cfg.seed)
        result = mcts_optimize(p, cfg)
    elapsed = time.perf_counter() - started

    horner = tree_op_count(horner_transform(p, result.best_order)) if result.best_order else result.best_cost
    report = StatsReport(
        naive=naive_op_count(p),
        horner=horner,
        cse=result.best_cost,
        order=tuple(v.name for v in result.best_order),
        config=config,
        trace=[row.total for row in result.trace] if args.method in ("mcts", "random") else [],
        wall_time=elapsed if args.timing else None,
    )
    if args.format == "json":
        _write(args, emit_stats(report))
    elif args.format == "tac":
        _write(args, emit_tac(result.best_code))
    else:
        _write(args, emit_c_like(result.best_code, args.name, variables=p.variables))
    if args.stats:
        Path(args.stats).write_text(emit_stats(report), encoding="utf-8")
    return EXIT_OK


def run_sweep(
    p: Polynomial, cps: Sequence[float], ns: Sequence[int], seeds: int, direction: Direction
) -> List[Tuple[float, int, int, int]]:
    """One (cp, N, seed, best_total) row per cell, in grid order.

    Cells share a cost cache, which only memoizes a pure function of the
    order, so every row equals a standalone run with the same settings.
    """
    ev = CostEvaluator(p)
    rows = []
    for cp in cps:
        for n in ns:
            for seed in range(seeds):
                cfg = MctsConfig(expansions=n, cp=cp, direction=direction, seed=seed)
                res = mcts_optimize(p, cfg, evaluator=ev)
                rows.append((cp, n, seed, res.best_cost.total))
    return rows


def _cmd_sweep(args) -> int:
    text, _label = _read_input(args)
    p, _ws = _parse(text)
    if not p.variables:
        raise UsageError("sweep needs a polynomial with variables")
    if args.seeds < 1 or min(args.sweep_n) < 1 or min(args.sweep_cp) <= 0:
        raise UsageError("--seeds and --sweep-n must be >= 1 and --sweep-cp positive")
    direction = Direction(args.direction) if args.direction else _default_direction(text)
    _write(args, sweep_csv(run_sweep(p, args.sweep_cp, args.sweep_n, args.seeds, direction)))
    return EXIT_OK


def _cmd_generate(args) -> int:
    ws = Workspace()
    if args.kind == "resultant":
        if args.m < 1 or args.n < 1:
            raise UsageError("degrees must be >= 1")
        p = cached_resultant(args.m, args.n, ws, os.environ.get(CACHE_ENV))
        text = f"# resultant {args.m} {args.n}\n{format_polynomial(p)}\n"
    else:
        if min(args.vars, args.terms, args.degree) < 1:
            raise UsageError("--vars, --terms and --degree must be >= 1")
        p = structured_random(args.vars, args.terms, args.degree, args.seed, workspace=ws)
        text = (
            f"# structured vars={args.vars} terms={args.terms} degree={args.degree} seed={args.seed}\n"
            f"{format_polynomial(p)}\n"
        )
    _write(args, text)
    return EXIT_OK


_COMMANDS = {"count": _cmd_count, "optimize": _cmd_optimize, "sweep": _cmd_sweep, "generate": _cmd_generate}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"mctshorner: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"mctshorner: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ResourceLimitError as exc:
        print(f"mctshorner: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ValueError as exc:
        print(f"mctshorner: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
