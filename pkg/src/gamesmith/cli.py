"""Command-line front end: check, synth, verify, simulate, serve.

Exit codes: 0 winning/pass, 1 losing/fail, 2 unknown, 3 usage error,
4 parse or semantic error.  All output for fixed inputs and seeds is
byte-deterministic; wall-clock timings are only printed behind --timings.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import gdl
from .model import GamesmithError, PLAYER_2, SemanticError
from .simulate import (
    RandomAdversary,
    ScriptAdversary,
    SimulationError,
    SpoilerAdversary,
    create_session,
    step,
)
from .synth import SynthConfig, synthesize
from .verify import verify_all

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 3
EXIT_PARSE = 4
EXIT_INTERNAL = 70


class _FileError(GamesmithError):
    def __init__(self, path: str, cause: Exception):
        super().__init__(str(cause))
        self.path = path
        self.cause = cause


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_game(path: str):
    try:
        return gdl.parse_game(_read(path))
    except (gdl.GdlSyntaxError, SemanticError) as exc:
        raise _FileError(path, exc) from exc


def _load_strategy(path: str):
    try:
        return gdl.parse_strategy(_read(path))
    except (gdl.GdlSyntaxError, SemanticError) as exc:
        raise _FileError(path, exc) from exc


def _format_credit_set(credits) -> str:
    inner = ", ".join(
        "(" + ",".join(map(str, c)) + ")" for c in sorted(credits)
    )
    return "{" + inner + "}"


def _print_error(path: str, err: Exception, out) -> None:
    span = getattr(err, "span", None)
    if span is not None:
        print(f"error: {path}:{span.line}:{span.column}: {err}", file=out)
    else:
        print(f"error: {path}: {err}", file=out)


def _json_out(obj) -> None:
    print(json.dumps(obj, sort_keys=True, indent=2))


def _cmd_check(args) -> int:
    game = _load_game(args.game)
    spec = game.objectives
    if args.format == "json":
        _json_out(
            {
                "name": game.name,
                "states": len(game.states),
                "edges": len(game.edges),
                "dimensions": game.dimension,
                "energy_dims": sorted(spec.energy_dims),
                "mean_payoff": [
                    {
                        "dim": b.dim,
                        "threshold": {
                            "num": b.threshold.numerator,
                            "den": b.threshold.denominator,
                        },
                    }
                    for b in spec.mean_payoff
                ],
                "buchi_targets": sorted(spec.buchi_targets),
                "parity": spec.use_parity,
            }
        )
        return EXIT_OK
    print(
        f"game {game.name}: {len(game.states)} states, {len(game.edges)} edges, "
        f"{game.dimension} dimensions"
    )
    parts = []
    if spec.energy_dims:
        parts.append("energy dims {" + ",".join(map(str, sorted(spec.energy_dims))) + "}")
    for b in spec.mean_payoff:
        parts.append(
            f"meanpayoff dim {b.dim} <= "
            f"{b.threshold.numerator}/{b.threshold.denominator}"
        )
    if spec.buchi_targets:
        parts.append("buchi {" + ",".join(sorted(spec.buchi_targets)) + "}")
    if spec.use_parity:
        parts.append("parity")
    print("objectives: " + ("; ".join(parts) if parts else "none"))
    print("OK")
    return EXIT_OK


def _cmd_synth(args) -> int:
    game = _load_game(args.game)
    max_cap = args.max_cap
    env_cap = os.environ.get("GAMESMITH_MAX_CAP")
    if env_cap is not None and args.max_cap_default:
        max_cap = int(env_cap)
    config = SynthConfig(
        engine=args.engine,
        max_cap=max_cap,
        node_limit=args.node_limit,
        ceiling=args.ceiling,
    )
    result = synthesize(game, config)

    if result.status == "WINNING":
        report = verify_all(game, result.strategy, result.chosen_credit)
        if not report.passed:  # pragma: no cover - soundness gate
            print("internal error: synthesized strategy failed verification", file=sys.stderr)
            return EXIT_INTERNAL

    if args.format == "json":
        payload = {
            "status": result.status,
            "engine": result.engine,
            "credits": sorted([list(c) for c in result.credits]) if result.credits else None,
            "chosen_credit": list(result.chosen_credit) if result.chosen_credit is not None else None,
            "mp_slack": {str(k): v for k, v in sorted(result.mp_slack.items())},
            "reason": result.reason,
            "caps_tried": result.caps_tried,
            "arena_nodes": result.arena_nodes,
            "final_cap": result.final_cap,
        }
        if result.strategy is not None:
            payload["strategy"] = gdl.serialize_strategy(result.strategy)
        _json_out(payload)
    else:
        if result.status == "WINNING":
            print(f"WINNING, credits {_format_credit_set(result.credits)}")
            print(f"engine: {result.engine}; cap: {result.final_cap}")
            if result.mp_slack:
                slack = ", ".join(
                    f"dim {d}: {v}" for d, v in sorted(result.mp_slack.items())
                )
                print(f"mean-payoff slack (not a requirement): {slack}")
            print("verification: PASS")
        elif result.status == "LOSING":
            print(f"LOSING ({result.reason})")
        else:
            print(f"UNKNOWN ({result.reason})")
        if args.timings:
            print(f"time: {result.timings.get('total', 0.0):.3f}s")

    if result.strategy is not None:
        text = gdl.serialize_strategy(result.strategy)
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        elif args.format == "text":
            sys.stdout.write(text)
    return {"WINNING": EXIT_OK, "LOSING": EXIT_FAIL, "UNKNOWN": EXIT_UNKNOWN}[result.status]


def _parse_credit(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    return tuple(int(part) for part in text.split(","))


def _format_rational(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


def _cmd_verify(args) -> int:
    game = _load_game(args.game)
    strategy = _load_strategy(args.strategy)
    c0 = _parse_credit(args.credit)
    report = verify_all(game, strategy, c0)
    if args.format == "json":
        _json_out(report.to_json_dict())
        return EXIT_OK if report.passed else EXIT_FAIL
    for dim in sorted(report.energy):
        v = report.energy[dim]
        mins = "-inf" if v.neg_inf else str(v.min_prefix)
        line = (
            f"energy dim {dim}: {'PASS' if v.passed else 'FAIL'} "
            f"(min prefix sum {mins}, credit {v.initial_credit})"
        )
        print(line)
        if v.witness is not None:
            print(f"  witness: {_render_witness(v.witness)}")
    for dim in sorted(report.mean_payoff):
        v = report.mean_payoff[dim]
        print(
            f"meanpayoff dim {dim}: {'PASS' if v.passed else 'FAIL'} "
            f"(max cycle mean {_format_rational(v.value)}, "
            f"threshold {_format_rational(v.threshold)})"
        )
        if v.witness is not None:
            print(f"  witness: {_render_witness(v.witness)}")
    if report.recurrence is not None:
        v = report.recurrence
        print(f"{v.kind}: {'PASS' if v.passed else 'FAIL'}")
        if v.witness is not None:
            print(f"  witness: {_render_witness(v.witness)}")
    for w in report.warnings:
        print(f"warning: {w}")
    print(f"overall: {'PASS' if report.passed else 'FAIL'}")
    return EXIT_OK if report.passed else EXIT_FAIL


def _render_witness(w) -> str:
    prefix = " -> ".join(f"{s}@{m}" for s, m in w.prefix)
    if not w.cycle:
        return prefix
    cyc = " -> ".join(f"{s}@{m}" for s, m in w.cycle)
    return f"{prefix} then repeat [{cyc} -> {w.cycle[0][0]}@{w.cycle[0][1]}]"


def _cmd_simulate(args) -> int:
    game = _load_game(args.game)
    strategy = _load_strategy(args.strategy)
    c0 = _parse_credit(args.credit) if args.credit else None
    session = create_session(game, strategy, c0)
    if args.adversary == "random":
        policy = RandomAdversary(args.seed)
    elif args.adversary == "script":
        policy = ScriptAdversary([s for s in (args.script or "").split(",") if s])
    elif args.adversary == "spoiler":
        policy = SpoilerAdversary(game, strategy, session.c0, seed=args.seed)
    else:
        return _repl(session)

    stopped = None
    while session.edge_count < args.steps:
        if session.owner_to_move() != PLAYER_2:
            step(session)  # budget-paused controller turn
        else:
            try:
                step(session, policy.choose(session))
            except SimulationError as exc:
                stopped = str(exc)
                break
    if args.format == "json":
        _json_out(_simulation_json(session, stopped))
        return EXIT_OK
    for entry in session.trace:
        _print_trace_entry(entry)
    if stopped is not None:
        print(f"stopped: {stopped}")
    _print_summary(session)
    return EXIT_OK


def _simulation_json(session, stopped) -> dict:
    means = {}
    for b in session.spec.mean_payoff:
        m = session.running_mean(b.dim)
        means[str(b.dim)] = None if m is None else {
            "num": m.numerator, "den": m.denominator,
        }
    return {
        "trace": [
            {
                "step": t.step,
                "src": t.src,
                "dst": t.dst,
                "label": t.label,
                "mover": t.mover,
                "weights": list(t.weight),
                "credits_after": list(t.credits_after),
                "sums_after": list(t.sums_after),
            }
            for t in session.trace
        ],
        "final": {
            "state": session.state,
            "credits": list(session.credits),
            "steps": session.edge_count,
            "buchi_visits": session.buchi_visits,
            "energy_violated": session.energy_violated,
            "running_means": means,
        },
        "stopped": stopped,
    }


def _print_trace_entry(entry) -> None:
    label = f" label={entry.label!r}" if entry.label else ""
    print(
        f"step {entry.step}: [{entry.mover}] {entry.src} -> {entry.dst}"
        f"{label} weights=({','.join(map(str, entry.weight))})"
    )


def _print_summary(session) -> None:
    credits = ",".join(map(str, session.credits))
    means = []
    for b in session.spec.mean_payoff:
        m = session.running_mean(b.dim)
        means.append(
            f"mean{b.dim}={_format_rational(m) if m is not None else 'n/a'}"
        )
    parts = [
        f"final: state={session.state}",
        f"credits=({credits})",
        f"steps={session.edge_count}",
        f"buchi_visits={session.buchi_visits}",
        f"energy_violated={'yes' if session.energy_violated else 'no'}",
    ]
    print(" ".join(parts + means))


def _repl(session) -> int:
    """Interactive environment play on stdin."""
    print("interactive play; commands: <destination> | undo | quit")
    while True:
        if session.owner_to_move() == PLAYER_2:
            opts = ", ".join(session.legal_destinations())
            prompt = f"[{session.state}] env moves: {opts} > "
        else:
            prompt = f"[{session.state}] controller paused; enter to advance > "
        try:
            line = input(prompt).strip()
        except EOFError:
            break
        if line == "quit":
            break
        try:
            if line == "undo":
                session.undo()
            elif session.owner_to_move() != PLAYER_2:
                step(session)
            else:
                step(session, line)
        except (SimulationError, GamesmithError) as exc:
            print(f"error: {exc}")
            continue
        _print_summary(session)
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    game_text = _read(args.game) if args.game else None
    strategy_text = _read(args.strategy) if args.strategy else None
    if game_text is not None:
        gdl.parse_game(game_text)
    if strategy_text is not None:
        gdl.parse_strategy(strategy_text)
    ui_dir = args.ui_dir
    if ui_dir is None and os.path.isdir(os.path.join("frontend", "dist")):
        ui_dir = os.path.join("frontend", "dist")
    app = create_app(
        default_game_text=game_text,
        default_strategy_text=strategy_text,
        ui_dir=ui_dir,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gamesmith",
        description="Synthesize, verify and play controllers for "
        "multi-weighted two-player graph games.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="parse and validate a game file")
    p_check.add_argument("game")
    p_check.add_argument("--format", choices=["text", "json"], default="text")
    p_check.set_defaults(func=_cmd_check)

    p_synth = sub.add_parser("synth", help="synthesize a winning controller")
    p_synth.add_argument("game")
    p_synth.add_argument("-o", "--output", help="write the strategy here")
    p_synth.add_argument(
        "--engine", choices=["auto", "capped", "antichain"], default="auto"
    )
    p_synth.add_argument("--max-cap", type=int, default=4096, dest="max_cap")
    p_synth.add_argument("--node-limit", type=int, default=500_000)
    p_synth.add_argument("--ceiling", type=int, default=None)
    p_synth.add_argument("--format", choices=["text", "json"], default="text")
    p_synth.add_argument("--timings", action="store_true")
    p_synth.set_defaults(func=_cmd_synth)

    p_verify = sub.add_parser("verify", help="check a strategy against a game")
    p_verify.add_argument("game")
    p_verify.add_argument("strategy")
    p_verify.add_argument(
        "--credit", default="", help="initial credit, e.g. 0,0 (one per energy dim)"
    )
    p_verify.add_argument("--format", choices=["text", "json"], default="text")
    p_verify.set_defaults(func=_cmd_verify)

    p_sim = sub.add_parser("simulate", help="play a strategy against an adversary")
    p_sim.add_argument("game")
    p_sim.add_argument("strategy")
    p_sim.add_argument(
        "--adversary",
        choices=["random", "script", "spoiler", "human"],
        default="random",
    )
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--steps", type=int, default=20)
    p_sim.add_argument("--script", default="", help="comma-separated destinations")
    p_sim.add_argument("--credit", default="")
    p_sim.add_argument("--format", choices=["text", "json"], default="text")
    p_sim.set_defaults(func=_cmd_simulate)

    p_serve = sub.add_parser("serve", help="run the web arena service")
    p_serve.add_argument("game", nargs="?")
    p_serve.add_argument("strategy", nargs="?")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--ui-dir", default=None)
    p_serve.set_defaults(func=_cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    raw_args = argv if argv is not None else sys.argv[1:]
    args.max_cap_default = not any(str(a).startswith("--max-cap") for a in raw_args)
    for name in ("max_cap", "node_limit", "steps"):
        if getattr(args, name, 1) is not None and getattr(args, name, 1) <= 0:
            print(f"error: --{name.replace('_', '-')} must be positive", file=sys.stderr)
            return EXIT_USAGE
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc.filename}: no such file", file=sys.stderr)
        return EXIT_USAGE
    except _FileError as exc:
        _print_error(exc.path, exc.cause, sys.stderr)
        return EXIT_PARSE
    except (gdl.GdlSyntaxError, SemanticError) as exc:
        _print_error(getattr(args, "game", "<input>"), exc, sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GamesmithError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
