"""GameEnv adapters binding each engine to the shared episode contract.

The kitchen env runs the macro executor: a decision hands a macro to one
chef, primitives are re-grounded every tick so paths adapt to the partner,
and the next decision point is whichever chef finished a macro first. The
pursuit envs buffer the first mover's action so both resolve simultaneously.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import Optional

from . import describe, hanabi, kitchen, pursuit
from .core import ActionId, DEFAULT_NAMES, IllegalAction

DEFAULT_KITCHEN_HORIZON = 400

GAMES = ("hanabi", "kitchen", "capture", "escape")


def builtin_layout(name: str) -> kitchen.KitchenLayout:
    text = (
        resources.files("coord_arena")
        .joinpath(f"data/layouts/{name}.layout")
        .read_text(encoding="utf-8")
    )
    return kitchen.parse_layout(text, name=name)


def builtin_map(name: str) -> pursuit.RoomGraph:
    text = (
        resources.files("coord_arena")
        .joinpath(f"data/maps/{name}.map")
        .read_text(encoding="utf-8")
    )
    return pursuit.parse_map(text, name=name)


class HanabiEnv:
    game = "hanabi"
    player_count = 2

    def __init__(self, names: tuple[str, str] = DEFAULT_NAMES):
        self.names = names

    def reset(self, seed: int) -> hanabi.HanabiState:
        return hanabi.deal(seed, names=self.names)

    def is_terminal(self, state) -> bool:
        return hanabi.is_terminal(state)

    def current_player(self, state) -> int:
        return state.current_player

    def legal_actions(self, state) -> list[ActionId]:
        return hanabi.legal_actions(state)

    def observe(self, state, player: int) -> str:
        return describe.describe_hanabi(state, player)

    def apply(self, state, action: ActionId):
        nxt, _ = hanabi.apply_action(state, action)
        return nxt

    def score(self, state) -> int:
        return hanabi.score(state)

    def description(self, player: int) -> str:
        return describe.game_description("hanabi", player, self.names)


@dataclass
class KitchenEpisodeState:
    board: kitchen.KitchenState
    macros: list[Optional[str]]  # active macro per chef

    def clone(self) -> "KitchenEpisodeState":
        return KitchenEpisodeState(self.board.clone(), list(self.macros))


class KitchenEnv:
    game = "kitchen"
    player_count = 2

    def __init__(
        self,
        layout: kitchen.KitchenLayout | str = "cramped_room",
        horizon: int = DEFAULT_KITCHEN_HORIZON,
        include_partner_info: bool = True,
        names: tuple[str, str] = DEFAULT_NAMES,
    ):
        self.layout = builtin_layout(layout) if isinstance(layout, str) else layout
        self.horizon = horizon
        self.include_partner_info = include_partner_info
        self.names = names

    def reset(self, seed: int) -> KitchenEpisodeState:
        return KitchenEpisodeState(
            kitchen.initial_state(self.layout, names=self.names), [None, None]
        )

    def is_terminal(self, state) -> bool:
        return state.board.tick_count >= self.horizon

    def current_player(self, state) -> int:
        for player in range(2):
            if state.macros[player] is None:
                return player
        raise RuntimeError("no decision pending")

    def legal_actions(self, state) -> list[ActionId]:
        player = self.current_player(state)
        labels = kitchen.feasible_macros(state.board, player)
        return [ActionId("kitchen", i, label) for i, label in enumerate(labels)]

    def observe(self, state, player: int) -> str:
        return describe.describe_kitchen(
            state.board, player, include_partner_info=self.include_partner_info
        )

    def apply(self, state, action: ActionId) -> KitchenEpisodeState:
        player = self.current_player(state)
        if action.label not in kitchen.feasible_macros(state.board, player):
            raise IllegalAction(f"{action.label!r} infeasible for player {player}")
        nxt = state.clone()
        nxt.macros[player] = action.label
        self._run_until_decision(nxt)
        return nxt

    def _run_until_decision(self, state: KitchenEpisodeState) -> None:
        while (
            all(m is not None for m in state.macros)
            and state.board.tick_count < self.horizon
        ):
            prims = []
            finishing = []
            for player in range(2):
                try:
                    plan = kitchen.ground(state.board, player, state.macros[player])
                except kitchen.NoPath:
                    plan = ["stay"]  # aborted macro: burn one tick, then re-decide
                prims.append(plan[0])
                if len(plan) == 1:
                    finishing.append(player)
            self._yield_on_conflict(state.board, prims)
            state.board = kitchen.tick(state.board, tuple(prims))
            for player in finishing:
                state.macros[player] = None

    @staticmethod
    def _yield_on_conflict(board: kitchen.KitchenState, prims: list[str]) -> None:
        """Break head-on and same-cell livelocks: the higher seat gives way.

        Orient bumps (a directional prim into a wall or station) never move
        the agent, so they cannot conflict.
        """
        moves = []
        for player, prim in enumerate(prims):
            if prim not in kitchen.DELTA:
                return
            dr, dc = kitchen.DELTA[prim]
            r, c = board.positions[player]
            cell = (r + dr, c + dc)
            moves.append(cell if cell in board.layout.floor else None)
        if moves[0] is None or moves[1] is None:
            return
        if moves[0] == moves[1]:
            prims[1] = "stay"
        elif moves[0] == board.positions[1] and moves[1] == board.positions[0]:
            prims[1] = kitchen.ground(board, 1, "move away.")[0]

    def score(self, state) -> int:
        return state.board.score

    def description(self, player: int) -> str:
        return describe.game_description(
            "kitchen", player, self.names, layout=self.layout
        )


class PursuitEnv:
    player_count = 2

    def __init__(
        self,
        mode: str,
        graph: pursuit.RoomGraph | str | None = None,
        names: tuple[str, str] = DEFAULT_NAMES,
    ):
        self.game = mode
        if graph is None:
            graph = "rooms9" if mode == "capture" else "lair9"
        self.graph = builtin_map(graph) if isinstance(graph, str) else graph
        self.mode = mode
        self.names = names

    def reset(self, seed: int) -> pursuit.PursuitState:
        return pursuit.initial_state(self.graph, self.mode, names=self.names)

    def is_terminal(self, state) -> bool:
        return pursuit.is_terminal(state)

    def _active_players(self, state) -> list[int]:
        return [
            p
            for p in range(2)
            if not state.downed[p] and not state.escaped[p]
        ]

    def current_player(self, state) -> int:
        active = self._active_players(state)
        if state.pending is not None:
            waiting = [p for p in active if p != state.pending[0]]
            if waiting:
                return waiting[0]
        return active[0]

    def legal_actions(self, state) -> list[ActionId]:
        player = self.current_player(state)
        labels = pursuit.legal_action_labels(state, player)
        return [ActionId(self.mode, i, label) for i, label in enumerate(labels)]

    def observe(self, state, player: int) -> str:
        return describe.describe_pursuit(state, self.mode, player)

    def apply(self, state, action: ActionId):
        player = self.current_player(state)
        if action.label not in pursuit.legal_action_labels(state, player):
            raise IllegalAction(f"{action.label!r} not legal for player {player}")
        active = self._active_players(state)
        if state.pending is None and len(active) > 1:
            nxt = state.clone()
            nxt.pending = (player, action.label)
            return nxt
        actions: list[Optional[str]] = [None, None]
        if state.pending is not None:
            actions[state.pending[0]] = state.pending[1]
        actions[player] = action.label
        return pursuit.step(state, tuple(actions))

    def score(self, state) -> int:
        return pursuit.score(state)

    def description(self, player: int) -> str:
        return describe.game_description(self.mode, player, self.names)


def make_env(game: str, **kwargs):
    if game == "hanabi":
        return HanabiEnv(names=kwargs.get("names", DEFAULT_NAMES))
    if game == "kitchen":
        return KitchenEnv(
            layout=kwargs.get("layout") or "cramped_room",
            horizon=kwargs.get("horizon") or DEFAULT_KITCHEN_HORIZON,
            include_partner_info=kwargs.get("include_partner_info", True),
            names=kwargs.get("names", DEFAULT_NAMES),
        )
    if game in ("capture", "escape"):
        return PursuitEnv(
            game,
            graph=kwargs.get("layout"),
            names=kwargs.get("names", DEFAULT_NAMES),
        )
    raise ValueError(f"unknown game {game!r}")
