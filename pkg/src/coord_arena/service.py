"""Live-play session service: create a game, seat humans or agents, stream events.

HTTP surface (JSON, every payload carries ``"version": 1``):

- ``POST /sessions``                create; agent seats start playing at once
- ``GET  /sessions``                list summaries
- ``GET  /sessions/{id}/view?seat=N``  seat-scoped view (hidden info stays hidden)
- ``POST /sessions/{id}/actions``   submit an action for a seat
- ``GET  /sessions/{id}/events?cursor=N``  server-sent event stream, resumable

Sessions live in memory; a per-session lock serializes mutations while agent
decisions run outside it on snapshots.
"""

from __future__ import annotations

import json
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor, TimeoutError as FutureTimeout
from typing import Optional

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.responses import StreamingResponse
from pydantic import BaseModel, Field

from . import hanabi as hanabi_mod
from .agent import fallback_by_labels
from .core import ActionId
from .envs import GAMES, make_env
from .report import MatchupConfig, build_agent

SCHEMA_VERSION = 1
AGENT_DECISION_TIMEOUT = 120.0
SSE_KEEPALIVE_SECONDS = 15.0


class SeatSpec(BaseModel):
    kind: str = Field(pattern="^(human|agent)$")
    spec: Optional[str] = None  # agent spec string for agent seats


class CreateSessionRequest(BaseModel):
    game: str
    layout: Optional[str] = None
    seed: int = 0
    seats: list[SeatSpec]
    horizon: Optional[int] = None
    names: Optional[list[str]] = None


class SubmitActionRequest(BaseModel):
    seat: int
    action_index: int
    state_version: int


class Session:
    def __init__(self, sid: str, request: CreateSessionRequest):
        if request.game not in GAMES:
            raise ValueError(f"unknown game {request.game!r}")
        if len(request.seats) != 2:
            raise ValueError("exactly 2 seats required")
        names = tuple(request.names) if request.names else ("Alice", "Bob")
        if len(names) != 2:
            raise ValueError("names must list two players")
        self.id = sid
        self.game = request.game
        self.seed = request.seed
        self.env = make_env(
            request.game,
            layout=request.layout,
            horizon=request.horizon,
            names=names,
        )
        self.seats = request.seats
        matchup = MatchupConfig(game=request.game, agent_a="-", agent_b="-")
        self.agents = [
            build_agent(seat.spec, matchup, i, request.seed)
            if seat.kind == "agent"
            else None
            for i, seat in enumerate(request.seats)
        ]
        for seat in request.seats:
            if seat.kind == "agent" and not seat.spec:
                raise ValueError("agent seats need a spec")
        self.state = self.env.reset(request.seed)
        self.state_version = 0
        self.transcript: list[dict] = []
        self.events: list[dict] = []
        self.lock = threading.RLock()
        self.changed = threading.Condition(self.lock)
        self._advancing = False
        self._last_action: dict[int, ActionId] = {}
        self._append_event({"type": "created", "game": self.game, "seed": self.seed})

    # --- state helpers --------------------------------------------------------

    @property
    def finished(self) -> bool:
        return self.env.is_terminal(self.state)

    @property
    def status(self) -> str:
        return "finished" if self.finished else "live"

    def turn_seat(self) -> Optional[int]:
        if self.finished:
            return None
        return self.env.current_player(self.state)

    def legal(self) -> list[ActionId]:
        return self.env.legal_actions(self.state)

    def _append_event(self, event: dict) -> None:
        with self.lock:
            event = {"seq": len(self.events), "version": SCHEMA_VERSION, **event}
            self.events.append(event)
            self.changed.notify_all()

    def _apply(self, seat: int, action: ActionId, actor: str, flags: dict = None):
        self.state = self.env.apply(self.state, action)
        self.state_version += 1
        self._last_action[seat] = action
        entry = {"seat": seat, "label": action.label, "turn": len(self.transcript)}
        self.transcript.append(entry)
        event = {
            "type": "action",
            "seat": seat,
            "actor": actor,
            "label": action.label,
            "state_version": self.state_version,
            **(flags or {}),
        }
        self._append_event(event)
        if self.finished:
            self._append_event(
                {"type": "finished", "score": self.env.score(self.state)}
            )

    # --- agent driving ----------------------------------------------------------

    _decide_pool = ThreadPoolExecutor(max_workers=8, thread_name_prefix="decide")

    def kick(self, pool: ThreadPoolExecutor) -> None:
        """Start the advance loop if an agent seat is on turn."""
        with self.lock:
            if self._advancing or self.finished:
                return
            seat = self.turn_seat()
            if seat is None or self.agents[seat] is None:
                return
            self._advancing = True
        pool.submit(self._advance, pool)

    def _advance(self, pool: ThreadPoolExecutor) -> None:
        try:
            while True:
                with self.lock:
                    if self.finished:
                        return
                    seat = self.turn_seat()
                    if seat is None or self.agents[seat] is None:
                        return
                    state = self.state
                    legal = self.legal()
                    observation = self.env.observe(state, seat)
                    partner_last = self._last_action.get(1 - seat)
                    agent = self.agents[seat]
                future = self._decide_pool.submit(
                    agent.decide, self.env, state, seat, legal, observation, partner_last
                )
                flags = {}
                try:
                    action = future.result(timeout=AGENT_DECISION_TIMEOUT)
                except FutureTimeout:
                    action = fallback_by_labels(legal)
                    flags = {"fallback": "timeout"}
                except Exception as exc:  # agent failure: play safe, flag it
                    action = fallback_by_labels(legal)
                    flags = {"fallback": f"error: {exc}"}
                trace = getattr(agent, "traces", None)
                if trace:
                    flags["trace_ref"] = f"{self.id}/{seat}/{len(trace) - 1}"
                with self.lock:
                    self._apply(seat, action, actor="agent", flags=flags)
        finally:
            with self.lock:
                self._advancing = False

    # --- views --------------------------------------------------------------------

    def view(self, seat: int) -> dict:
        with self.lock:
            your_turn = self.turn_seat() == seat
            legal = (
                [
                    {
                        "id": f"{self.state_version}:{a.index}",
                        "index": a.index,
                        "label": a.label,
                    }
                    for a in self.legal()
                ]
                if your_turn
                else []
            )
            return {
                "version": SCHEMA_VERSION,
                "session": self.id,
                "game": self.game,
                "seat": seat,
                "status": self.status,
                "turn_seat": self.turn_seat(),
                "your_turn": your_turn,
                "state_version": self.state_version,
                "score": self.env.score(self.state),
                "observation": self.env.observe(self.state, seat),
                "legal_actions": legal,
                "render": self._render(seat),
                "transcript": list(self.transcript),
                "cursor": len(self.events),
            }

    def _render(self, seat: int) -> dict:
        state = self.state
        if self.game == "hanabi":
            partner = 1 - seat
            return {
                "kind": "hanabi",
                "stacks": {
                    color: top
                    for color, top in zip(hanabi_mod.COLORS, state.stacks)
                },
                "own_hand": [
                    {
                        "plausible_colors": [
                            hanabi_mod.COLORS[c] for c in sorted(k.colors)
                        ],
                        "plausible_ranks": sorted(k.ranks),
                        "touched": k.touched,
                    }
                    for k in state.knowledge[seat]
                ],
                "partner_hand": [
                    {"color": hanabi_mod.COLORS[c.color], "rank": c.rank}
                    for c in state.hands[partner]
                ],
                "partner_knowledge": [
                    {
                        "plausible_colors": [
                            hanabi_mod.COLORS[c] for c in sorted(k.colors)
                        ],
                        "plausible_ranks": sorted(k.ranks),
                        "touched": k.touched,
                    }
                    for k in state.knowledge[partner]
                ],
                "reveal_tokens": state.reveal_tokens,
                "lives": state.lives,
                "deck_size": len(state.deck),
                "discard_pile": [c.label for c in state.discard_pile],
                "names": list(state.names),
            }
        if self.game == "kitchen":
            board = state.board
            return {
                "kind": "kitchen",
                "grid": list(board.layout.rows),
                "positions": [list(p) for p in board.positions],
                "facings": list(board.facings),
                "inventories": list(board.inventories),
                "cookers": [
                    {"onions": c.onions, "status": c.status, "timer": c.timer}
                    for c in board.cookers
                ],
                "counters": dict(board.counters),
                "tick": board.tick_count,
                "score": board.score,
                "names": list(board.names),
            }
        return {
            "kind": self.game,
            "rooms": list(state.graph.rooms),
            "doors": [
                {"a": a, "b": b, "open": state.door_open[(a, b)]}
                for a, b in state.graph.doors
            ],
            "buttons": {
                str(room): [f"{a}-{b}" for a, b in doors]
                for room, doors in state.graph.buttons.items()
            },
            "agent_rooms": list(state.agent_rooms),
            "adversary_room": state.adversary_room,
            "generators": {
                str(room): {
                    "required": state.graph.generators[room],
                    "done": state.generator_fixes_done[room],
                }
                for room in state.graph.generators
            },
            "gate_room": state.graph.gate_room,
            "gate_open": state.gate_open,
            "downed": list(state.downed),
            "escaped": list(state.escaped),
            "turn": state.turn,
            "names": list(state.names),
        }


def create_app(ui_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="coord-arena play service")
    sessions: dict[str, Session] = {}
    # separate pools so advance loops cannot starve the decide calls they wait on
    pool = ThreadPoolExecutor(max_workers=8, thread_name_prefix="advance")
    app.state.sessions = sessions

    def get_session(sid: str) -> Session:
        session = sessions.get(sid)
        if session is None:
            raise HTTPException(status_code=404, detail="UnknownSession")
        return session

    @app.post("/sessions")
    def create_session(request: CreateSessionRequest):
        sid = uuid.uuid4().hex[:12]
        try:
            session = Session(sid, request)
        except Exception as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        sessions[sid] = session
        session.kick(pool)
        return {"version": SCHEMA_VERSION, "id": sid, "status": session.status}

    @app.get("/sessions")
    def list_sessions():
        return {
            "version": SCHEMA_VERSION,
            "sessions": [
                {
                    "id": s.id,
                    "game": s.game,
                    "status": s.status,
                    "seats": [seat.kind for seat in s.seats],
                    "score": s.env.score(s.state),
                }
                for s in sessions.values()
            ],
        }

    @app.get("/sessions/{sid}/view")
    def get_view(sid: str, seat: int = Query(ge=0, le=1)):
        return get_session(sid).view(seat)

    @app.post("/sessions/{sid}/actions")
    def submit_action(sid: str, request: SubmitActionRequest):
        session = get_session(sid)
        with session.lock:
            if session.finished:
                raise HTTPException(status_code=409, detail="SessionFinished")
            if session.turn_seat() != request.seat:
                raise HTTPException(status_code=409, detail="NotYourTurn")
            if session.agents[request.seat] is not None:
                raise HTTPException(status_code=409, detail="NotYourTurn")
            if request.state_version != session.state_version:
                raise HTTPException(status_code=409, detail="StaleAction")
            legal = session.legal()
            if not 0 <= request.action_index < len(legal):
                raise HTTPException(status_code=409, detail="StaleAction")
            action = legal[request.action_index]
            before = len(session.events)
            session._apply(request.seat, action, actor="human")
            events = session.events[before:]
        session.kick(pool)
        return {
            "version": SCHEMA_VERSION,
            "ack": action.label,
            "state_version": session.state_version,
            "events": events,
        }

    @app.get("/sessions/{sid}/events")
    def event_stream(sid: str, request: Request, cursor: int = 0):
        session = get_session(sid)

        def generate():
            position = cursor
            while True:
                with session.lock:
                    pending = session.events[position:]
                    finished = session.finished and not session._advancing
                for event in pending:
                    yield (
                        f"id: {event['seq']}\n"
                        f"event: {event['type']}\n"
                        f"data: {json.dumps(event, ensure_ascii=False)}\n\n"
                    )
                position += len(pending)
                if finished and position >= len(session.events):
                    yield "event: end\ndata: {}\n\n"
                    return
                with session.changed:
                    if len(session.events) <= position:
                        session.changed.wait(timeout=SSE_KEEPALIVE_SECONDS)
                if len(session.events) <= position:
                    yield ": keepalive\n\n"

        return StreamingResponse(generate(), media_type="text/event-stream")

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
