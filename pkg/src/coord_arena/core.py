"""Shared episode contract: actions, results, errors, and the step loop.

Every game engine plugs in through the ``GameEnv`` interface; every decision
source through ``Agent``. ``run_episode`` owns the observe -> decide -> apply
loop and is the only place a transcript is assembled.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional, Protocol, runtime_checkable


class CoordArenaError(Exception):
    """Base for all package errors."""


class IllegalAction(CoordArenaError):
    pass


class TerminalState(CoordArenaError):
    pass


class AgentFailure(CoordArenaError):
    """A decision source gave up (e.g. backend exhausted its retries)."""


class BackendFailure(CoordArenaError):
    pass


class ReplayExhausted(BackendFailure):
    pass


class ParseFailure(CoordArenaError):
    pass


@dataclass(frozen=True)
class ActionId:
    """One entry of a legal-action list.

    ``index`` is the ordinal within the list it was issued from; ``label`` is
    the canonical text shown to agents (unique within that list).
    """

    game: str
    index: int
    label: str


@dataclass
class TranscriptEntry:
    player: int
    action: ActionId
    observation: str


@dataclass
class EpisodeResult:
    score: int
    turns: int
    transcript: list[TranscriptEntry]
    latencies: list[float]
    aborted: bool = False
    failure: Optional[str] = None


@runtime_checkable
class GameEnv(Protocol):
    """Turn-structured view of a game: exactly one seat decides at a time."""

    game: str
    player_count: int

    def reset(self, seed: int): ...

    def is_terminal(self, state) -> bool: ...

    def current_player(self, state) -> int: ...

    def legal_actions(self, state) -> list[ActionId]: ...

    def observe(self, state, player: int) -> str: ...

    def apply(self, state, action: ActionId): ...

    def score(self, state) -> int: ...


class Agent(Protocol):
    name: str

    def decide(
        self,
        env: GameEnv,
        state,
        player: int,
        legal: list[ActionId],
        observation: str,
        partner_last: Optional[ActionId],
    ) -> ActionId: ...


@dataclass
class DecisionRecord:
    """What one decide() call cost; agents may attach a structured trace."""

    latency: float = 0.0
    trace: Optional[object] = None


def run_episode(
    env: GameEnv,
    agents: list[Agent],
    max_turns: int,
    seed: int,
) -> EpisodeResult:
    """Play one episode to termination (or ``max_turns`` decisions).

    The caller's agents are queried strictly in the order the engine asks for
    decisions; their configuration is never touched. If an agent raises
    :class:`AgentFailure`, the episode aborts with the partial transcript.
    """
    if len(agents) != env.player_count:
        raise ValueError(
            f"need {env.player_count} agents for {env.game}, got {len(agents)}"
        )
    state = env.reset(seed)
    transcript: list[TranscriptEntry] = []
    latencies: list[float] = []
    last_action: dict[int, ActionId] = {}
    for agent in agents:
        reset = getattr(agent, "reset", None)
        if reset is not None:
            reset()

    while not env.is_terminal(state) and len(transcript) < max_turns:
        player = env.current_player(state)
        observation = env.observe(state, player)
        legal = env.legal_actions(state)
        partner_last = last_action.get(1 - player)
        started = time.monotonic()
        try:
            action = agents[player].decide(
                env, state, player, legal, observation, partner_last
            )
        except AgentFailure as exc:
            return EpisodeResult(
                score=env.score(state),
                turns=len(transcript),
                transcript=transcript,
                latencies=latencies,
                aborted=True,
                failure=str(exc),
            )
        reported = getattr(agents[player], "last_latency", None)
        latencies.append(
            reported if reported is not None else time.monotonic() - started
        )
        if action.label not in {a.label for a in legal}:
            raise IllegalAction(
                f"agent {agents[player].name} returned {action.label!r} "
                f"not in the legal list"
            )
        state = env.apply(state, action)
        transcript.append(TranscriptEntry(player, action, observation))
        last_action[player] = action

    return EpisodeResult(
        score=env.score(state),
        turns=len(transcript),
        transcript=transcript,
        latencies=latencies,
    )


DEFAULT_NAMES = ("Alice", "Bob")
