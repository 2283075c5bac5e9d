"""Room-graph pursuit games.

Capture: two agents corner a fleeing thief; doors toggle via room buttons.
Escape: two agents fix generators to open an exit gate while a killer hunts
them; the game is won the moment any one agent exits.

Both resolve a joint agent step, then one adversary step. The adversary is a
pure function of the state, so replays reproduce exactly.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .core import CoordArenaError, DEFAULT_NAMES

CAPTURE_TURN_LIMIT = 40
ESCAPE_TURN_LIMIT = 50
DEFAULT_GENERATOR_FIXES = 3


class MalformedMap(CoordArenaError):
    pass


def _door_key(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class RoomGraph:
    name: str
    rooms: tuple[int, ...]
    doors: tuple[tuple[int, int], ...]
    initial_open: dict  # door key -> bool
    buttons: dict  # room -> tuple of door keys toggled
    generators: dict  # room -> fixes required (escape)
    gate_room: Optional[int]
    agent_start: tuple[int, int]
    adversary_start: int
    turn_limit: Optional[int] = None

    def neighbors(self, room: int) -> list[int]:
        out = []
        for a, b in self.doors:
            if a == room:
                out.append(b)
            elif b == room:
                out.append(a)
        return sorted(out)


def parse_map(text: str, name: str = "custom") -> RoomGraph:
    """Parse the declarative map format (one ``key: value`` directive per line)."""
    rooms: list[int] = []
    doors: list[tuple[int, int]] = []
    initial_open: dict[tuple[int, int], bool] = {}
    buttons: dict[int, tuple] = {}
    generators: dict[int, int] = {}
    gate_room = None
    agent_start = None
    adversary_start = None
    turn_limit = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(":")
        key = key.strip()
        parts = rest.split()
        if key == "rooms":
            rooms = [int(p) for p in parts]
        elif key == "door":
            a, b = int(parts[0]), int(parts[1])
            flag = parts[2] if len(parts) > 2 else "open"
            if flag not in ("open", "closed"):
                raise MalformedMap(f"bad door flag {flag!r}")
            doors.append(_door_key(a, b))
            initial_open[_door_key(a, b)] = flag == "open"
        elif key == "button":
            room = int(parts[0])
            if parts[1] != "toggles":
                raise MalformedMap(f"bad button line {line!r}")
            toggled = []
            for pair in parts[2:]:
                a, b = pair.split("-")
                toggled.append(_door_key(int(a), int(b)))
            buttons[room] = tuple(toggled)
        elif key == "generator":
            room = int(parts[0])
            fixes = DEFAULT_GENERATOR_FIXES
            if len(parts) >= 3 and parts[1] == "fixes":
                fixes = int(parts[2])
            generators[room] = fixes
        elif key == "gate":
            gate_room = int(parts[0])
        elif key == "agents":
            agent_start = (int(parts[0]), int(parts[1]))
        elif key == "adversary":
            adversary_start = int(parts[0])
        elif key == "turn_limit":
            turn_limit = int(parts[0])
        else:
            raise MalformedMap(f"unknown directive {key!r}")
    if not rooms:
        raise MalformedMap("map has no rooms")
    room_set = set(rooms)
    for a, b in doors:
        if a not in room_set or b not in room_set:
            raise MalformedMap(f"door ({a},{b}) references unknown room")
    for room, toggled in buttons.items():
        if room not in room_set:
            raise MalformedMap(f"button in unknown room {room}")
        for key in toggled:
            if key not in initial_open:
                raise MalformedMap(f"button toggles unknown door {key}")
    if agent_start is None or adversary_start is None:
        raise MalformedMap("map needs agents: and adversary: lines")
    return RoomGraph(
        name=name,
        rooms=tuple(rooms),
        doors=tuple(doors),
        initial_open=initial_open,
        buttons=buttons,
        generators=generators,
        gate_room=gate_room,
        agent_start=agent_start,
        adversary_start=adversary_start,
        turn_limit=turn_limit,
    )


@dataclass
class PursuitState:
    graph: RoomGraph
    mode: str  # capture | escape
    agent_rooms: list[int]
    adversary_room: int
    door_open: dict
    generator_fixes_done: dict
    gate_open: bool = False
    downed: list[bool] = field(default_factory=lambda: [False, False])
    escaped: list[bool] = field(default_factory=lambda: [False, False])
    captured: bool = False
    turn: int = 0
    pending: Optional[tuple[int, str]] = None  # buffered first mover of a joint step
    names: tuple[str, str] = DEFAULT_NAMES

    def clone(self) -> "PursuitState":
        return PursuitState(
            graph=self.graph,
            mode=self.mode,
            agent_rooms=list(self.agent_rooms),
            adversary_room=self.adversary_room,
            door_open=dict(self.door_open),
            generator_fixes_done=dict(self.generator_fixes_done),
            gate_open=self.gate_open,
            downed=list(self.downed),
            escaped=list(self.escaped),
            captured=self.captured,
            turn=self.turn,
            pending=self.pending,
            names=self.names,
        )


def initial_state(
    graph: RoomGraph, mode: str, names: tuple[str, str] = DEFAULT_NAMES
) -> PursuitState:
    if mode not in ("capture", "escape"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "escape" and (not graph.generators or graph.gate_room is None):
        raise MalformedMap("escape maps need generators and a gate room")
    return PursuitState(
        graph=graph,
        mode=mode,
        agent_rooms=list(graph.agent_start),
        adversary_room=graph.adversary_start,
        door_open=dict(graph.initial_open),
        generator_fixes_done={room: 0 for room in graph.generators},
        names=names,
    )


def turn_limit(state: PursuitState) -> int:
    if state.graph.turn_limit is not None:
        return state.graph.turn_limit
    return CAPTURE_TURN_LIMIT if state.mode == "capture" else ESCAPE_TURN_LIMIT


def open_neighbors(state: PursuitState, room: int) -> list[int]:
    return [
        n
        for n in state.graph.neighbors(room)
        if state.door_open[_door_key(room, n)]
    ]


def open_distances(state: PursuitState, start: int) -> dict:
    """BFS shortest-path distances through open doors."""
    dist = {start: 0}
    queue = deque([start])
    while queue:
        room = queue.popleft()
        for n in open_neighbors(state, room):
            if n not in dist:
                dist[n] = dist[room] + 1
                queue.append(n)
    return dist


def is_won(state: PursuitState) -> bool:
    if state.mode == "capture":
        return state.captured
    return any(state.escaped)


def is_lost(state: PursuitState) -> bool:
    if state.mode == "escape" and all(state.downed):
        return True
    return state.turn >= turn_limit(state) and not is_won(state)


def is_terminal(state: PursuitState) -> bool:
    return is_won(state) or is_lost(state)


def score(state: PursuitState) -> int:
    return 1 if is_won(state) else 0


def unfixed_generators(state: PursuitState) -> list[int]:
    return sorted(
        room
        for room, required in state.graph.generators.items()
        if state.generator_fixes_done[room] < required
    )


def legal_action_labels(state: PursuitState, player: int) -> list[str]:
    if state.downed[player] or state.escaped[player]:
        return []
    room = state.agent_rooms[player]
    labels = [f"Move to Room {n}" for n in open_neighbors(state, room)]
    labels.append("Stay in current Room")
    if room in state.graph.buttons:
        labels.append("Press the button")
    if state.mode == "escape":
        if room in state.graph.generators and room in unfixed_generators(state):
            labels.append("Fix the generator")
        if state.gate_open and room == state.graph.gate_room:
            labels.append("Exit through the gate")
    return labels


def adversary_policy(state: PursuitState, mode: str) -> int:
    """Deterministic adversary move; ties break toward the smallest room id."""
    pos = state.adversary_room
    if mode == "flee":
        active = list(state.agent_rooms)
        candidates = [
            n for n in open_neighbors(state, pos) if n not in active
        ]
        if not candidates:
            return pos
        best, best_dist = None, -1
        for n in sorted(candidates):
            dist = open_distances(state, n)
            d = min((dist.get(a, 10**9) for a in active), default=0)
            if d > best_dist:
                best, best_dist = n, d
        return best
    # hunt: one step along the shortest open path toward the nearest live agent
    targets = [
        room
        for i, room in enumerate(state.agent_rooms)
        if not state.downed[i] and not state.escaped[i]
    ]
    if not targets:
        return pos
    dist_from_adv = open_distances(state, pos)
    reachable = [t for t in sorted(targets) if t in dist_from_adv]
    if not reachable:
        return pos
    target = min(reachable, key=lambda t: (dist_from_adv[t], t))
    if target == pos:
        return pos
    dist_to_target = open_distances(state, target)
    options = [
        n
        for n in open_neighbors(state, pos)
        if dist_to_target.get(n, 10**9) == dist_to_target[pos] - 1
    ]
    return min(options)


def _cornered(state: PursuitState) -> bool:
    """No open-door move avoids the agents (zero open moves counts)."""
    return all(
        n in state.agent_rooms for n in open_neighbors(state, state.adversary_room)
    )


def step(state: PursuitState, actions: tuple[Optional[str], Optional[str]]) -> PursuitState:
    """Resolve one joint turn; a downed or escaped agent passes ``None``."""
    nxt = state.clone()
    nxt.pending = None
    # button presses toggle doors before anything else
    for player, label in enumerate(actions):
        if label == "Press the button":
            for key in nxt.graph.buttons[nxt.agent_rooms[player]]:
                nxt.door_open[key] = not nxt.door_open[key]
    for player, label in enumerate(actions):
        if label is None:
            continue
        if label.startswith("Move to Room "):
            nxt.agent_rooms[player] = int(label.removeprefix("Move to Room "))
        elif label == "Fix the generator":
            room = nxt.agent_rooms[player]
            if nxt.generator_fixes_done.get(room, 0) < nxt.graph.generators.get(room, 0):
                nxt.generator_fixes_done[room] += 1
        elif label == "Exit through the gate":
            if nxt.gate_open and nxt.agent_rooms[player] == nxt.graph.gate_room:
                nxt.escaped[player] = True
    if nxt.graph.generators and not unfixed_generators(nxt):
        nxt.gate_open = True

    if nxt.mode == "capture":
        if nxt.adversary_room in nxt.agent_rooms or _cornered(nxt):
            nxt.captured = True
        else:
            nxt.adversary_room = adversary_policy(nxt, "flee")
    else:
        if not is_won(nxt):
            nxt.adversary_room = adversary_policy(nxt, "hunt")
            for player in range(2):
                if (
                    not nxt.downed[player]
                    and not nxt.escaped[player]
                    and nxt.agent_rooms[player] == nxt.adversary_room
                ):
                    nxt.downed[player] = True
    nxt.turn += 1
    return nxt


def state_to_dict(state: PursuitState) -> dict:
    return {
        "map_name": state.graph.name,
        "mode": state.mode,
        "agent_rooms": list(state.agent_rooms),
        "adversary_room": state.adversary_room,
        "door_open": {f"{a}-{b}": v for (a, b), v in state.door_open.items()},
        "generator_fixes_done": {str(k): v for k, v in state.generator_fixes_done.items()},
        "gate_open": state.gate_open,
        "downed": list(state.downed),
        "escaped": list(state.escaped),
        "captured": state.captured,
        "turn": state.turn,
        "names": list(state.names),
    }


def state_from_dict(doc: dict, graph: RoomGraph) -> PursuitState:
    return PursuitState(
        graph=graph,
        mode=doc["mode"],
        agent_rooms=list(doc["agent_rooms"]),
        adversary_room=doc["adversary_room"],
        door_open={
            _door_key(*(int(x) for x in key.split("-"))): v
            for key, v in doc["door_open"].items()
        },
        generator_fixes_done={int(k): v for k, v in doc["generator_fixes_done"].items()},
        gate_open=doc["gate_open"],
        downed=list(doc["downed"]),
        escaped=list(doc["escaped"]),
        captured=doc["captured"],
        turn=doc["turn"],
        names=tuple(doc["names"]),
    )
