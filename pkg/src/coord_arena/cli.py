"""Command-line front door: matchups, QA evaluation, the live service,
and a state-dump debugging aid.

A config file (``key = value`` lines, same names as the long flags) supplies
defaults; explicit flags win.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import describe, qa
from .kitchen import UnreachableStation
from .backends import complete
from .envs import GAMES, make_env
from .report import (
    ConfigError,
    MatchupConfig,
    export_report,
    format_summary,
    run_matchup,
    _build_backend,
)


def load_config_file(path: str) -> dict:
    values = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"bad config line {raw!r}")
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coord-arena",
        description="Pure-coordination game arena: play, evaluate, serve.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    play = sub.add_parser("play", help="run a matchup and export the report")
    play.add_argument("--config", help="key = value defaults file")
    play.add_argument("--game", choices=GAMES)
    play.add_argument("--layout", help="kitchen layout or pursuit map name")
    play.add_argument("--agent-a", help="agent spec for seat A")
    play.add_argument("--agent-b", help="agent spec for seat B")
    play.add_argument("--episodes", type=int)
    play.add_argument("--seed", type=int, action="append", dest="seeds",
                      help="repeatable; one seed per episode")
    play.add_argument("--horizon", type=int)
    play.add_argument("--swap-positions", action="store_true", default=None)
    play.add_argument("--no-tom", action="store_true", default=None)
    play.add_argument("--no-verify", action="store_true", default=None)
    play.add_argument("--omit-partner-info", action="store_true", default=None)
    play.add_argument("--workers", type=int)
    play.add_argument("--out", help="report file path")
    play.add_argument("--format", choices=("csv", "jsonl"), default="csv")

    qa_cmd = sub.add_parser("qa", help="run the MCQ evaluation against a backend")
    qa_cmd.add_argument("--pack", help="scenario pack (defaults to the bundled one)")
    qa_cmd.add_argument("--backend", required=True,
                        help="http:<model>@<endpoint> or replay:<path>")
    qa_cmd.add_argument("--trials", type=int, default=3)
    qa_cmd.add_argument("--workers", type=int, default=4)
    qa_cmd.add_argument("--model-name", default=None, help="label for the CSV rows")
    qa_cmd.add_argument("--out", help="results CSV path")

    serve = sub.add_parser("serve", help="start the live-play session service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--ui", help="directory of built web-ui assets to serve at /ui")

    desc = sub.add_parser("describe", help="print the serialized view of a fresh state")
    desc.add_argument("--game", choices=GAMES, required=True)
    desc.add_argument("--layout")
    desc.add_argument("--seed", type=int, default=0)
    desc.add_argument("--player", type=int, default=0, choices=(0, 1))
    desc.add_argument("--preamble", action="store_true",
                      help="print the rules preamble instead of the state")
    return parser


def _merge_play_config(args) -> MatchupConfig:
    values = {}
    if args.config:
        values.update(load_config_file(args.config))
    def pick(name, cast=None, default=None):
        arg = getattr(args, name, None)
        if arg is not None:
            return arg
        if name in values:
            raw = values[name]
            if cast is bool:
                return raw.lower() in ("1", "true", "yes", "on")
            return cast(raw) if cast else raw
        return default

    seeds = args.seeds
    if seeds is None and "seeds" in values:
        seeds = [int(s) for s in values["seeds"].split(",")]
    game = pick("game")
    if game is None:
        raise ConfigError("--game is required (flag or config file)")
    episodes = pick("episodes", int, 3)
    if seeds is not None:
        episodes = len(seeds)
    return MatchupConfig(
        game=game,
        agent_a=pick("agent_a", default="scripted:random-legal"),
        agent_b=pick("agent_b", default="scripted:random-legal"),
        layout=pick("layout"),
        episodes=episodes,
        seeds=seeds,
        horizon=pick("horizon", int),
        swap_positions=bool(pick("swap_positions", bool, False)),
        no_tom=bool(pick("no_tom", bool, False)),
        no_verify=bool(pick("no_verify", bool, False)),
        omit_partner_info=bool(pick("omit_partner_info", bool, False)),
        workers=int(pick("workers", int, 1)),
    )


def cmd_play(args) -> int:
    cfg = _merge_play_config(args)
    report = run_matchup(cfg)
    print(format_summary(report))
    if args.out:
        export_report(report, args.out, args.format)
        print(f"wrote {args.out}")
    return 0 if report.aborted_count == 0 else 1


def cmd_qa(args) -> int:
    records = qa.load_pack(Path(args.pack) if args.pack else None)
    items = qa.render_all(records)
    backend = _build_backend(args.backend)
    trials = args.trials

    def ask(item_trial):
        item, _trial = item_trial
        messages = [
            {
                "role": "system",
                "content": "Answer the multiple-choice question. Reply with the "
                "letter of the correct option, like: Answer: A",
            },
            {"role": "user", "content": item.prompt},
        ]
        return complete(backend, messages)

    cells = [(item, t) for item in items for t in range(trials)]
    if args.workers > 1 and not args.backend.startswith("replay:"):
        with ThreadPoolExecutor(max_workers=args.workers) as pool:
            flat = list(pool.map(ask, cells))
    else:
        flat = [ask(cell) for cell in cells]
    responses = [
        flat[i * trials : (i + 1) * trials] for i in range(len(items))
    ]
    report = qa.score_run(items, responses, trials)
    model = args.model_name or args.backend
    for category in qa.CATEGORIES:
        print(
            f"{category}: mean accuracy {report.mean[category]:.3f} over "
            f"{report.counts[category]} items x {trials} trials "
            f"(random baseline {report.random_baseline[category]:.3f}, "
            f"unmatched {report.unmatched[category]})"
        )
    if args.out:
        qa.write_results_csv(args.out, model, report)
        print(f"wrote {args.out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def cmd_describe(args) -> int:
    env = make_env(args.game, layout=args.layout)
    if args.preamble:
        print(env.description(args.player))
        return 0
    state = env.reset(args.seed)
    print(env.observe(state, args.player))
    return 0


def main(argv=None) -> int:
    # split-access layouts are legitimate; the flags stay on the parsed layout
    warnings.filterwarnings("ignore", category=UnreachableStation)
    args = build_parser().parse_args(argv)
    try:
        if args.command == "play":
            return cmd_play(args)
        if args.command == "qa":
            return cmd_qa(args)
        if args.command == "serve":
            return cmd_serve(args)
        if args.command == "describe":
            return cmd_describe(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError(args.command)


if __name__ == "__main__":
    sys.exit(main())
