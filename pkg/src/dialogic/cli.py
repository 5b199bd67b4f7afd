"""Batch command line: parse, prove, strategy, translate, check, entail,
suite, serve.

Exit codes: entail answers map to 0 (yes), 1 (no), 2 (unknown); every other
subcommand exits 0 on success and 3 on any error or suite mismatch.  Output
on stdout is byte-deterministic for fixed inputs and limits; diagnostics go
to stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import dialogue, entail, gkk, strategy, translate
from .formula import FormulaError, parse_formula, polarity_table, render_formula


def _limits_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--depth", type=int, default=40,
                   help="maximum rule-application depth (default 40)")
    p.add_argument("--fresh", type=int, default=3,
                   help="fresh-variable budget per branch (default 3)")
    p.add_argument("--inst", type=int, default=3,
                   help="instantiations per formula per branch (default 3)")
    p.add_argument("--timeout-ms", type=int, default=5000,
                   help="wall-clock budget in milliseconds (default 5000)")
    return p


def _limits(args) -> gkk.SearchLimits:
    return gkk.SearchLimits(max_depth=args.depth, max_fresh_vars=args.fresh,
                            max_instantiations_per_formula=args.inst,
                            time_budget_ms=args.timeout_ms)


def _emit(payload) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dialogic",
        description="dialogue games, winning strategies and strategic sequent proofs")
    sub = parser.add_subparsers(dest="command", required=True)
    limits = _limits_parent()

    p = sub.add_parser("parse", help="canonical form and polarity table")
    p.add_argument("formula")

    p = sub.add_parser("prove", parents=[limits],
                       help="derive a sequent (G1, G2 |- D) or a formula")
    p.add_argument("goal")
    p.add_argument("--strategic-check", action="store_true",
                   help="also report the strategic-restriction check")

    p = sub.add_parser("strategy", parents=[limits],
                       help="winning strategy for a formula, or NONE")
    p.add_argument("formula")

    p = sub.add_parser("translate", parents=[limits],
                       help="convert between strategy and derivation files")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--to-derivation", metavar="STRATEGY_JSON")
    group.add_argument("--to-strategy", metavar="DERIVATION_JSON")
    group.add_argument("--strategize", metavar="DERIVATION_JSON")

    p = sub.add_parser("check", help="validate a game/strategy/derivation file")
    p.add_argument("file")

    p = sub.add_parser("entail", parents=[limits],
                       help="decide hypotheses |= conclusion")
    p.add_argument("-H", "--hypothesis", action="append", default=[],
                   metavar="FORMULA")
    p.add_argument("-C", "--conclusion", required=True, metavar="FORMULA")

    p = sub.add_parser("suite", parents=[limits], help="run a problem suite")
    p.add_argument("file")

    p = sub.add_parser("serve", help="start the interactive game server")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return parser


def _evidence_json(e) -> dict:
    if isinstance(e, entail.WinningStrategy):
        return {"kind": "winning-strategy",
                "strategy": strategy.strategy_to_json(e.strategy)}
    if isinstance(e, entail.RefutingStrategy):
        return {"kind": "refuting-strategy",
                "strategy": strategy.strategy_to_json(e.strategy)}
    if isinstance(e, entail.PolarityCertificate):
        return {"kind": "polarity-certificate", "direction": e.direction,
                "predicate": e.predicate}
    if isinstance(e, entail.BoundsExhausted):
        return {"kind": "bounds-exhausted", "timed_out": e.timed_out}
    raise TypeError(e)


def _cmd_parse(args) -> int:
    f = parse_formula(args.formula)
    table = polarity_table(f)
    _emit({"formula": render_formula(f),
           "polarity": {name: {"positive": e.positive, "negative": e.negative}
                        for name, e in table.entries}})
    return 0


def _cmd_prove(args) -> int:
    if "|-" in args.goal:
        goal = gkk.parse_sequent(args.goal)
    else:
        goal = gkk.Sequent((), (parse_formula(args.goal),))
    try:
        d = gkk.prove(goal, _limits(args))
    except gkk.TimeBudgetExceeded:
        print("NONE")
        print("time budget exceeded", file=sys.stderr)
        return 0
    if d is None:
        print("NONE")
        return 0
    payload = gkk.derivation_to_json(d)
    if args.strategic_check:
        check = gkk.is_strategic(d)
        payload = {"derivation": payload, "strategic": check.ok}
    _emit(payload)
    return 0


def _cmd_strategy(args) -> int:
    f = parse_formula(args.formula)
    try:
        s = strategy.find_winning_strategy(f, _limits(args))
    except gkk.TimeBudgetExceeded:
        print("NONE")
        print("time budget exceeded", file=sys.stderr)
        return 0
    if s is None:
        print("NONE")
        return 0
    _emit(strategy.strategy_to_json(s))
    return 0


def _cmd_translate(args) -> int:
    if args.to_derivation:
        s = strategy.strategy_from_json(json.loads(Path(args.to_derivation).read_text()))
        _emit(gkk.derivation_to_json(translate.strategy_to_derivation(s)))
        return 0
    path = args.to_strategy or args.strategize
    d = gkk.derivation_from_json(json.loads(Path(path).read_text()))
    if args.to_strategy:
        _emit(strategy.strategy_to_json(translate.derivation_to_strategy(d)))
    else:
        _emit(gkk.derivation_to_json(translate.strategize(d, _limits(args))))
    return 0


def _cmd_check(args) -> int:
    data = json.loads(Path(args.file).read_text())
    if "moves" in data:
        kind = "game"
        try:
            dialogue.game_from_json(data)
            ok, message = True, None
        except Exception as e:
            ok, message = False, str(e)
    elif "rule" in data:
        kind = "derivation"
        report = gkk.validate_derivation(gkk.derivation_from_json(data))
        ok, message = report.ok, report.message
    elif "formula" in data and "children" in data:
        kind = "strategy"
        report = strategy.validate_strategy(strategy.strategy_from_json(data))
        ok, message = report.ok, report.message
    else:
        print("unrecognized file shape", file=sys.stderr)
        return 3
    _emit({"kind": kind, "ok": ok, "message": message})
    return 0 if ok else 3


def _cmd_entail(args) -> int:
    if not args.hypothesis:
        print("at least one -H hypothesis is required", file=sys.stderr)
        return 3
    problem = entail.Problem(
        "cli", tuple(parse_formula(h) for h in args.hypothesis),
        parse_formula(args.conclusion))
    verdict = entail.decide(problem, _limits(args))
    _emit({"answer": verdict.answer,
           "evidence": _evidence_json(verdict.evidence)})
    return {"yes": 0, "no": 1, "unknown": 2}[verdict.answer]


def _cmd_suite(args) -> int:
    summary = entail.run_suite(args.file, _limits(args))
    matches = 0
    expected_total = 0
    for r in summary.results:
        if r.matched is None:
            status = "-"
        else:
            expected_total += 1
            matches += r.matched
            status = "ok" if r.matched else "MISMATCH"
        expected = r.problem.expected or "-"
        print(f"{r.problem.id}: expected={expected} got={r.verdict.answer} [{status}]")
        print(f"  took {r.seconds:.2f}s", file=sys.stderr)
    print(f"{matches}/{expected_total} expected matches")
    return 0 if summary.ok else 3


def _cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


_HANDLERS = {
    "parse": _cmd_parse,
    "prove": _cmd_prove,
    "strategy": _cmd_strategy,
    "translate": _cmd_translate,
    "check": _cmd_check,
    "entail": _cmd_entail,
    "suite": _cmd_suite,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 3 if e.code not in (0, None) else 0
    try:
        return _HANDLERS[args.command](args)
    except (FormulaError, gkk.GkkError, dialogue.DialogueError,
            strategy.StrategyError, translate.TranslateError,
            entail.EntailError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
