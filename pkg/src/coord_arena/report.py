"""Matchup running, aggregation, and report import/export.

A matchup plays N episodes of one pairing (optionally from both seat
orders), records per-episode score/turns/latency, and aggregates to
mean +/- standard error. Exports are fully deterministic: no wall-clock
fields, stable column order, and scripted backends report zero latency.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from .agent import CacAgent, CacConfig
from .backends import HttpChatBackend, ReplayBackend
from .core import CoordArenaError, EpisodeResult, run_episode
from .envs import make_env
from .policies import POLICY_NAMES, ScriptedAgent

DEFAULT_EPISODES = 3
DEFAULT_TURN_CAP = 100_000


class ConfigError(CoordArenaError):
    pass


@dataclass
class MatchupConfig:
    game: str
    agent_a: str
    agent_b: str
    layout: Optional[str] = None
    episodes: int = DEFAULT_EPISODES
    seeds: Optional[list[int]] = None
    horizon: Optional[int] = None
    swap_positions: bool = False
    no_tom: bool = False
    no_verify: bool = False
    omit_partner_info: bool = False
    names: tuple[str, str] = ("Alice", "Bob")
    workers: int = 1

    def __post_init__(self):
        if self.seeds is None:
            self.seeds = list(range(self.episodes))
        if len(self.seeds) != self.episodes:
            raise ConfigError(
                f"{len(self.seeds)} seeds given for {self.episodes} episodes"
            )


@dataclass
class EpisodeRecord:
    order: int  # 0 = (A, B) seating, 1 = swapped
    episode: int
    seed: int
    score: int
    turns: int
    latency_mean: float
    latency_std: float
    aborted: bool

    def row(self) -> list:
        return [
            self.order,
            self.episode,
            self.seed,
            self.score,
            self.turns,
            f"{self.latency_mean:.6f}",
            f"{self.latency_std:.6f}",
            int(self.aborted),
        ]


@dataclass
class Aggregate:
    mean: float
    stderr: float
    n: int


@dataclass
class MatchupReport:
    config: MatchupConfig
    records: list[EpisodeRecord]

    def by_order(self, order: int) -> list[EpisodeRecord]:
        return [r for r in self.records if r.order == order]

    def score_aggregate(self, order: int = 0) -> Aggregate:
        return aggregate([r.score for r in self.by_order(order)])

    def turns_aggregate(self, order: int = 0) -> Aggregate:
        return aggregate([r.turns for r in self.by_order(order)])

    def latency_summary(self) -> tuple[float, float]:
        """Pooled mean and std of per-episode decision-latency means."""
        samples = [r.latency_mean for r in self.records]
        if not samples:
            return (0.0, 0.0)
        mean = sum(samples) / len(samples)
        var = sum((s - mean) ** 2 for s in samples) / len(samples)
        return (mean, var**0.5)

    @property
    def aborted_count(self) -> int:
        return sum(1 for r in self.records if r.aborted)


def aggregate(samples: list[float]) -> Aggregate:
    """Sample mean and standard error (s / sqrt(n), ddof=1)."""
    n = len(samples)
    if n == 0:
        return Aggregate(0.0, 0.0, 0)
    mean = sum(samples) / n
    if n == 1:
        return Aggregate(mean, 0.0, 1)
    var = sum((s - mean) ** 2 for s in samples) / (n - 1)
    return Aggregate(mean, (var / n) ** 0.5, n)


def latency_stats_of(result: EpisodeResult) -> tuple[float, float]:
    if not result.latencies:
        return (0.0, 0.0)
    mean = sum(result.latencies) / len(result.latencies)
    var = sum((s - mean) ** 2 for s in result.latencies) / len(result.latencies)
    return (mean, var**0.5)


def build_agent(spec: str, cfg: MatchupConfig, seat: int, seed: int):
    """Agent-spec grammar (documented in the README):

    - ``scripted:<policy>``  one of the named deterministic policies
    - ``random``             alias for scripted:random-legal
    - ``replay:<path>``      planner responses from a file, one per line,
                             driven through the full decision pipeline
    - ``cac:http:<model>@<endpoint>``  chat-backed agent (ToM + verifier
                             share the planner backend unless ablated)
    - ``http:<model>@<endpoint>``      shorthand for the above
    """
    if spec == "random":
        spec = "scripted:random-legal"
    kind, _, rest = spec.partition(":")
    if kind == "scripted":
        if rest not in POLICY_NAMES:
            raise ConfigError(f"unknown policy {rest!r}; have {POLICY_NAMES}")
        return ScriptedAgent(rest, seed=seed * 2 + seat + 1)
    if kind == "http":
        spec, rest = f"cac:{spec}", f"http:{rest}"
        kind = "cac"
    if kind == "replay":
        kind, rest = "cac", spec
    if kind == "cac":
        backend = _build_backend(rest)
        return CacAgent(
            CacConfig(
                planner=backend,
                tom=None if cfg.no_tom else backend,
                verifier=None if cfg.no_verify else backend,
            ),
            name=spec,
        )
    raise ConfigError(f"unknown agent spec {spec!r}")


def _build_backend(spec: str):
    kind, _, rest = spec.partition(":")
    if kind == "replay":
        lines = Path(rest).read_text(encoding="utf-8").splitlines()
        return ReplayBackend([l for l in lines if l.strip()], name=f"replay:{rest}")
    if kind == "http":
        model, _, endpoint = rest.partition("@")
        if not model or not endpoint:
            raise ConfigError("http backend spec must be http:<model>@<endpoint>")
        return HttpChatBackend(endpoint=endpoint, model=model)
    raise ConfigError(f"unknown backend spec {spec!r}")


def run_matchup(cfg: MatchupConfig) -> MatchupReport:
    """Play every (order, episode) cell; abort-failures become flagged rows."""
    env_kwargs = {
        "layout": cfg.layout,
        "horizon": cfg.horizon,
        "include_partner_info": not cfg.omit_partner_info,
        "names": cfg.names,
    }
    orders = [0, 1] if cfg.swap_positions else [0]
    cells = [(order, i) for order in orders for i in range(cfg.episodes)]

    def play(cell):
        order, index = cell
        seed = cfg.seeds[index]
        env = make_env(cfg.game, **env_kwargs)
        specs = (cfg.agent_a, cfg.agent_b) if order == 0 else (cfg.agent_b, cfg.agent_a)
        agents = [build_agent(s, cfg, seat, seed) for seat, s in enumerate(specs)]
        max_turns = DEFAULT_TURN_CAP
        if cfg.game in ("capture", "escape") and cfg.horizon:
            max_turns = cfg.horizon * 2
        result = run_episode(env, agents, max_turns=max_turns, seed=seed)
        lat_mean, lat_std = latency_stats_of(result)
        return EpisodeRecord(
            order=order,
            episode=index,
            seed=seed,
            score=result.score,
            turns=result.turns,
            latency_mean=lat_mean,
            latency_std=lat_std,
            aborted=result.aborted,
        )

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            records = list(pool.map(play, cells))
    else:
        records = [play(cell) for cell in cells]
    return MatchupReport(config=cfg, records=records)


CSV_COLUMNS = [
    "game",
    "layout",
    "agent_a",
    "agent_b",
    "order",
    "episode",
    "seed",
    "score",
    "turns",
    "latency_mean",
    "latency_std",
    "aborted",
]


def export_report(report: MatchupReport, path, fmt: str = "csv") -> None:
    path = Path(path)
    if fmt == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for record in report.records:
                writer.writerow(
                    [
                        report.config.game,
                        report.config.layout or "",
                        report.config.agent_a,
                        report.config.agent_b,
                    ]
                    + record.row()
                )
    elif fmt == "jsonl":
        with open(path, "w", encoding="utf-8") as fh:
            config = asdict(report.config)
            config["names"] = list(config["names"])
            fh.write(json.dumps({"kind": "config", **config}, ensure_ascii=False) + "\n")
            for record in report.records:
                fh.write(
                    json.dumps({"kind": "episode", **asdict(record)}, ensure_ascii=False)
                    + "\n"
                )
    else:
        raise ConfigError(f"unknown export format {fmt!r}")


def import_report(path, fmt: str = "csv") -> MatchupReport:
    path = Path(path)
    if fmt == "csv":
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        if not rows:
            raise ConfigError("empty report file")
        first = rows[0]
        records = [
            EpisodeRecord(
                order=int(r["order"]),
                episode=int(r["episode"]),
                seed=int(r["seed"]),
                score=int(r["score"]),
                turns=int(r["turns"]),
                latency_mean=float(r["latency_mean"]),
                latency_std=float(r["latency_std"]),
                aborted=bool(int(r["aborted"])),
            )
            for r in rows
        ]
        seeds = sorted({rec.seed for rec in records})
        episodes = len({rec.episode for rec in records})
        config = MatchupConfig(
            game=first["game"],
            agent_a=first["agent_a"],
            agent_b=first["agent_b"],
            layout=first["layout"] or None,
            episodes=episodes,
            seeds=[rec.seed for rec in records if rec.order == 0][:episodes]
            or seeds[:episodes],
            swap_positions=any(rec.order == 1 for rec in records),
        )
        return MatchupReport(config=config, records=records)
    if fmt == "jsonl":
        lines = [
            json.loads(line)
            for line in Path(path).read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]
        config_doc = {
            k: v
            for k, v in next(l for l in lines if l.get("kind") == "config").items()
            if k != "kind"
        }
        config_doc["names"] = tuple(config_doc["names"])
        config = MatchupConfig(**config_doc)
        records = [
            EpisodeRecord(**{k: v for k, v in doc.items() if k != "kind"})
            for doc in lines
            if doc.get("kind") == "episode"
        ]
        return MatchupReport(config=config, records=records)
    raise ConfigError(f"unknown import format {fmt!r}")


def format_summary(report: MatchupReport) -> str:
    """Human-readable block printed by the CLI after a matchup."""
    cfg = report.config
    lines = [
        f"game={cfg.game} layout={cfg.layout or '-'} "
        f"A={cfg.agent_a} B={cfg.agent_b} episodes={cfg.episodes}"
    ]
    orders = [0, 1] if cfg.swap_positions else [0]
    for order in orders:
        score = report.score_aggregate(order)
        turns = report.turns_aggregate(order)
        side = "A|B" if order == 0 else "B|A"
        lines.append(
            f"  seats {side}: score {score.mean:.2f} +/- {score.stderr:.2f} "
            f"(n={score.n}), turns {turns.mean:.1f} +/- {turns.stderr:.1f}"
        )
    lat_mean, lat_std = report.latency_summary()
    lines.append(f"  latency (seconds) per decision: {lat_mean:.2f} +/- {lat_std:.2f}")
    if report.aborted_count:
        lines.append(f"  WARNING: {report.aborted_count} episode(s) aborted")
    return "\n".join(lines)
