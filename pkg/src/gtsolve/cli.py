"""``gt`` command-line interface.

Exit codes: 0 success, 1 usage error, 2 parse error, 3 invalid game or
unsupported request (validation, ties, wrong form, size guard), 4 when a
``batch`` run observes a violated claim.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from importlib import resources
from typing import Any, Sequence, Union

from gtsolve import corpus
from gtsolve.errors import ConfigError, GameError, UnknownName
from gtsolve.model import ExtensiveGame, NormalFormGame, Path, pareto_optimal_outcomes
from gtsolve.nash import (
    DEFAULT_MAX_STRATEGIES,
    backward_induction,
    pure_nash,
    superrational,
    to_normal_form,
)
from gtsolve.oracle import MAX_OUTCOMES, ppe_oracle
from gtsolve.ppe import compare, ppe
from gtsolve.text import ParseError, export_dot, parse_any, serialize_normal

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_INVALID, EXIT_CLAIM = 0, 1, 2, 3, 4
CONCEPTS = ("spe", "ppe", "nash", "superrational")

Game = Union[ExtensiveGame, NormalFormGame]


@dataclass(frozen=True)
class UsageError(Exception):
    message: str

    def __str__(self) -> str:
        return self.message


def report_schema() -> dict[str, Any]:
    """JSON Schema that every ``--json`` report conforms to."""
    text = resources.files("gtsolve").joinpath("schemas", "run_report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def _load(args) -> tuple[Game, dict[str, str], str]:
    """Return the game, its identity for the report, and a short display name."""
    if (args.file is None) == (args.corpus is None):
        raise UsageError("give exactly one of FILE or --corpus NAME")
    if args.corpus is not None:
        if args.corpus not in corpus.BUILTIN_NAMES:
            raise UsageError(f"unknown corpus game {args.corpus!r}; see `gt corpus list`")
        text, identity, name = corpus.source(args.corpus), {"kind": "corpus", "name": args.corpus}, args.corpus
    elif args.file == "-":
        text, identity, name = sys.stdin.read(), {"kind": "stdin"}, "<stdin>"
    else:
        try:
            with open(args.file, encoding="utf-8") as fh:
                text = fh.read()
        except (OSError, UnicodeDecodeError) as exc:
            raise UsageError(f"cannot read {args.file}: {exc}") from exc
        identity, name = {"kind": "file", "path": args.file}, args.file
    try:
        game = parse_any(text)
    except ParseError as exc:
        exc.source_name = name
        raise
    return game, identity, name


def _extensive(game: Game, what: str) -> ExtensiveGame:
    if not isinstance(game, ExtensiveGame):
        raise GameError(f"{what} needs an extensive-form game, input is in normal form")
    return game


def _normal(game: Game, what: str) -> NormalFormGame:
    if not isinstance(game, NormalFormGame):
        raise GameError(f"{what} needs a normal-form game, input is in extensive form")
    return game


def _path_json(path: Path) -> list[str]:
    return list(path.labels)


def _outcome_result(game: ExtensiveGame, concept: str, path: Path) -> dict[str, Any]:
    return {
        "concept": concept,
        "outcome": path.outcome,
        "path": _path_json(path),
        "payoffs": list(game.payoffs(path.outcome)),
    }


def _spe_json(game: ExtensiveGame) -> dict[str, Any]:
    report = backward_induction(game)
    result = _outcome_result(game, "spe", report.path)
    result["profile"] = {
        name: {
            game.node_name(nid): game.node(nid).moves[report.moves[nid]][0]
            for nid in game.decision_nodes(p)
        }
        for p, name in enumerate(game.players)
    }
    return result


def _ppe_json(game: ExtensiveGame, trace: bool) -> dict[str, Any]:
    report = ppe(game)
    result = _outcome_result(game, "ppe", report.path)
    if trace:
        result["trace"] = [
            {
                "node": game.node_name(step.node),
                "eliminated": step.eliminated,
                "eliminated_payoff": step.eliminated_payoff,
                "witness": step.witness,
                "guaranteed": step.guaranteed,
            }
            for step in report.trace
        ]
        result["stages"] = [
            {
                "node": game.node_name(stage.node),
                "entering": sorted(stage.entering),
                "surviving": sorted(stage.surviving),
                "move": game.node(stage.node).moves[stage.move][0],
            }
            for stage in report.stages
        ]
    return result


def _cell_json(g: NormalFormGame, cell) -> dict[str, Any]:
    return {
        "row": g.row_labels[cell.row],
        "col": g.col_labels[cell.col],
        "row_index": cell.row,
        "col_index": cell.col,
        "payoffs": list(cell.payoffs),
    }


def _describe_outcome(game: ExtensiveGame, result: dict[str, Any]) -> list[str]:
    payoffs = " ".join(f"{p}={v}" for p, v in zip(game.players, result["payoffs"]))
    return [
        f"{result['concept'].upper()} outcome #{result['outcome']}",
        f"  path: {','.join(result['path']) or '(root is a leaf)'}",
        f"  payoffs: {payoffs}",
    ]


def cmd_solve(args) -> tuple[dict[str, Any], str]:
    game, identity, _ = _load(args)
    concept = args.concept
    lines: list[str] = []
    if concept in ("spe", "ppe"):
        tree = _extensive(game, concept)
        result = _spe_json(tree) if concept == "spe" else _ppe_json(tree, args.trace)
        result["pareto_optimal"] = result["outcome"] in pareto_optimal_outcomes(tree)
        lines += _describe_outcome(tree, result)
        if args.trace and concept == "ppe":
            lines.append(f"  eliminations ({len(result['trace'])}):")
            for step in result["trace"]:
                lines.append(
                    f"    at {step['node']}: outcome #{step['eliminated']} "
                    f"(owner gets {step['eliminated_payoff']}) preempted by "
                    f"'{step['witness']}' guaranteeing {step['guaranteed']}"
                )
    elif concept == "nash":
        g = _normal(game, "nash")
        cells = [_cell_json(g, c) for c in pure_nash(g)]
        result = {"concept": "nash", "cells": cells}
        lines.append(f"pure Nash equilibria: {len(cells)}")
        lines += [f"  ({c['row']}, {c['col']}) payoffs {c['payoffs'][0]},{c['payoffs'][1]}" for c in cells]
    else:
        g = _normal(game, "superrational")
        found = superrational(g)
        result = {"concept": "superrational", "cells": [_cell_json(g, found.cell)], "tie": found.tie}
        c = result["cells"][0]
        lines.append(f"superrational cell: ({c['row']}, {c['col']}) payoffs {c['payoffs'][0]},{c['payoffs'][1]}")
        if found.tie:
            lines.append("  note: diagonal tie, lowest index chosen")
    report = {
        "command": "solve",
        "options": {"concept": concept, "trace": bool(args.trace)},
        "input": identity,
        "players": list(game.players),
        "results": [result],
    }
    return report, "\n".join(lines)


def _legend_json(game: ExtensiveGame, legends) -> list[dict[str, Any]]:
    return [
        {
            "label": s.label,
            "assignments": [{"node": game.node_name(nid), "move": mv} for nid, mv in s.assignments],
        }
        for s in legends
    ]


def cmd_convert(args) -> tuple[dict[str, Any], str]:
    game, identity, _ = _load(args)
    tree = _extensive(game, "convert")
    conv = to_normal_form(tree, max_strategies=args.max_strategies)
    text = serialize_normal(conv.game)
    legend = []
    for who, legends in (("rows", conv.rows), ("cols", conv.cols)):
        player = tree.players[0 if who == "rows" else 1]
        legend.append(f"; {who}: strategies of {player}")
        for s in legends:
            plan = ", ".join(f"{tree.node_name(nid)} -> {mv}" for nid, mv in s.assignments) or "(no decisions)"
            legend.append(f";   {s.label}: {plan}")
    report = {
        "command": "convert",
        "options": {"max_strategies": args.max_strategies},
        "input": identity,
        "players": list(tree.players),
        "normal_form": text,
        "legend": {"rows": _legend_json(tree, conv.rows), "cols": _legend_json(tree, conv.cols)},
    }
    return report, text + "\n".join(legend)


def cmd_compare(args) -> tuple[dict[str, Any], str]:
    game, identity, _ = _load(args)
    tree = _extensive(game, "compare")
    cmp = compare(tree)
    spe_json = _outcome_result(tree, "spe", cmp.spe.path)
    spe_json["pareto_optimal"] = cmp.spe_pareto_optimal
    ppe_json = _outcome_result(tree, "ppe", cmp.ppe.path)
    ppe_json["pareto_optimal"] = cmp.ppe_pareto_optimal
    comparison = {
        "verdict": cmp.verdict,
        "identical": cmp.identical,
        "ppe_dominates_spe": cmp.ppe_dominates_spe,
        "spe_dominates_ppe": cmp.spe_dominates_ppe,
        "per_player": dict(zip(tree.players, cmp.per_player)),
    }
    lines = []
    for r in (spe_json, ppe_json):
        lines += _describe_outcome(tree, r)
        lines.append(f"  Pareto-optimal: {'yes' if r['pareto_optimal'] else 'no'}")
    lines.append("under PPE relative to SPE: " + ", ".join(f"{p} {o}" for p, o in comparison["per_player"].items()))
    lines.append(f"verdict: {cmp.verdict}")
    report = {
        "command": "compare",
        "options": {},
        "input": identity,
        "players": list(tree.players),
        "results": [spe_json, ppe_json],
        "comparison": comparison,
    }
    return report, "\n".join(lines)


def _branching(value: str) -> tuple[int, int]:
    try:
        lo, hi = (int(x) for x in value.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected MIN,MAX") from None
    return lo, hi


def run_batch(seed: int, count: int, depth: int, branching: tuple[int, int], players: int) -> dict[str, Any]:
    corpus.GeneratorConfig(seed, depth, branching, players)  # fail fast on bad config
    if not 0 <= count:
        raise ConfigError(f"count must be >= 0, got {count}")
    tallies = dict(ppe_pareto=0, spe_pareto=0, equal=0, dominates=0, oracle_checked=0, oracle_agree=0)
    failures: list[int] = []
    disagreements: list[int] = []
    for game_seed in corpus.seed_stream(seed, count):
        game = corpus.random_game(corpus.GeneratorConfig(game_seed, depth, branching, players))
        cmp = compare(game)
        tallies["ppe_pareto"] += cmp.ppe_pareto_optimal
        tallies["spe_pareto"] += cmp.spe_pareto_optimal
        tallies["equal"] += cmp.identical
        tallies["dominates"] += cmp.ppe_dominates_spe
        if not cmp.ppe_pareto_optimal:
            failures.append(game_seed)
        if game.n_outcomes <= MAX_OUTCOMES:
            tallies["oracle_checked"] += 1
            if ppe_oracle(game) == cmp.ppe.outcome:
                tallies["oracle_agree"] += 1
            else:
                disagreements.append(game_seed)

    def frac(k: int, n: int) -> float | None:
        return k / n if n else None

    return {
        "count": count,
        "ppe_pareto_fraction": frac(tallies["ppe_pareto"], count),
        "spe_pareto_fraction": frac(tallies["spe_pareto"], count),
        "ppe_equals_spe_fraction": frac(tallies["equal"], count),
        "ppe_dominates_spe_fraction": frac(tallies["dominates"], count),
        "oracle_checked": tallies["oracle_checked"],
        "oracle_agreement_fraction": frac(tallies["oracle_agree"], tallies["oracle_checked"]),
        "ppe_pareto_failure_seeds": failures,
        "oracle_disagreement_seeds": disagreements,
    }


def cmd_batch(args) -> tuple[dict[str, Any], str]:
    aggregate = run_batch(args.seed, args.count, args.depth, args.branching, args.players)
    report = {
        "command": "batch",
        "options": {
            "seed": args.seed,
            "count": args.count,
            "depth": args.depth,
            "branching": list(args.branching),
            "players": args.players,
        },
        "input": {"kind": "generated"},
        "aggregate": aggregate,
    }
    # batch always reports JSON; the aggregate is the human summary too
    return report, json.dumps(aggregate, indent=2)


def cmd_export_dot(args) -> tuple[dict[str, Any], str]:
    game, identity, _ = _load(args)
    tree = _extensive(game, "export-dot")
    path = None
    if args.highlight == "spe":
        path = backward_induction(tree).path
    elif args.highlight == "ppe":
        path = ppe(tree).path
    dot = export_dot(tree, path)
    report = {
        "command": "export-dot",
        "options": {"highlight": args.highlight},
        "input": identity,
        "players": list(tree.players),
        "dot": dot,
    }
    return report, dot.rstrip("\n")


def cmd_corpus(args) -> tuple[dict[str, Any], str]:
    if args.corpus_command == "list":
        entries = []
        for name in corpus.BUILTIN_NAMES:
            g = corpus.builtin(name)
            entries.append({"name": name, "form": "extensive" if isinstance(g, ExtensiveGame) else "normal"})
        report = {"command": "corpus list", "options": {}, "input": {"kind": "corpus"}, "corpus": entries}
        return report, "\n".join(f"{e['name']}\t{e['form']}" for e in entries)
    try:
        text = corpus.source(args.name)
    except UnknownName as exc:
        raise UsageError(str(exc)) from None
    report = {
        "command": "corpus emit",
        "options": {},
        "input": {"kind": "corpus", "name": args.name},
        "text": text,
    }
    return report, text.rstrip("\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gt", description="Solve and compare equilibria of finite games.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_input(p: argparse.ArgumentParser) -> None:
        p.add_argument("file", nargs="?", metavar="FILE", help="game text file, or - for stdin")
        p.add_argument("--corpus", metavar="NAME", help="use a built-in game instead of FILE")
        p.add_argument("--json", action="store_true", help="emit a JSON report")

    p = sub.add_parser("solve", help="compute one solution concept")
    with_input(p)
    p.add_argument("--concept", choices=CONCEPTS, required=True)
    p.add_argument("--trace", action="store_true", help="include PPE elimination steps")
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("convert", help="extensive form to normal form")
    with_input(p)
    p.add_argument("--max-strategies", type=int, default=DEFAULT_MAX_STRATEGIES, metavar="N")
    p.set_defaults(handler=cmd_convert)

    p = sub.add_parser("compare", help="contrast SPE and PPE")
    with_input(p)
    p.set_defaults(handler=cmd_compare)

    p = sub.add_parser("batch", help="check claims over seeded random games")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--branching", type=_branching, default=(2, 3), metavar="MIN,MAX")
    p.add_argument("--players", type=int, default=2)
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_batch)

    p = sub.add_parser("export-dot", help="Graphviz rendering of a tree")
    with_input(p)
    p.add_argument("--highlight", choices=("none", "spe", "ppe"), default="none")
    p.set_defaults(handler=cmd_export_dot)

    p = sub.add_parser("corpus", help="built-in games")
    csub = p.add_subparsers(dest="corpus_command", required=True, parser_class=_Parser)
    q = csub.add_parser("list")
    q.add_argument("--json", action="store_true")
    q = csub.add_parser("emit")
    q.add_argument("name", metavar="NAME")
    q.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_corpus)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    started = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        report, human = args.handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        where = getattr(exc, "source_name", "<input>")
        print(f"error: {where}:{exc.span.line}:{exc.span.column}: {exc.message}", file=sys.stderr)
        if exc.expected:
            print(f"  expected {exc.expected}", file=sys.stderr)
        return EXIT_PARSE if exc.kind == "syntax" else EXIT_INVALID
    except GameError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID

    report["timing"] = {"elapsed_ms": round((time.perf_counter() - started) * 1000, 3)}
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        print(human)
    if report["command"] == "batch":
        agg = report["aggregate"]
        if agg["ppe_pareto_failure_seeds"] or agg["oracle_disagreement_seeds"]:
            print("error: a checked claim failed; see the failure seeds", file=sys.stderr)
            return EXIT_CLAIM
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
