"""Two-agent grid kitchen: macro actions over a primitive tick simulation.

Layout legend: ``X`` plain counter, ``O`` onion dispenser, ``P`` plate
dispenser, ``C`` cooker, ``D`` delivery, ``S`` shared counter, space floor,
digits spawn points. Stations are numbered densely per kind in row-major
order (plain counters become ``k0..kN``, shared counters ``s0..sN``).

Distances are steps to a cell adjacent to the target, so "0 units away"
means the agent already stands next to it. Soup cooks for exactly
``COOK_TICKS`` ticks once the third onion lands; a delivery scores 20.
"""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass
from typing import Optional

from .core import CoordArenaError, DEFAULT_NAMES

COOK_TICKS = 20
DELIVERY_POINTS = 20
ONIONS_PER_SOUP = 3

STATION_KINDS = {"O": "o", "P": "p", "C": "c", "D": "d", "S": "s", "X": "k"}
DIRECTIONS = (("up", -1, 0), ("down", 1, 0), ("left", 0, -1), ("right", 0, 1))
DELTA = {name: (dr, dc) for name, dr, dc in DIRECTIONS}
PRIMITIVES = ("up", "down", "left", "right", "interact", "stay")


class MalformedGrid(CoordArenaError):
    pass


class NoPath(CoordArenaError):
    pass


class UnreachableStation(UserWarning):
    pass


@dataclass(frozen=True)
class KitchenLayout:
    name: str
    rows: tuple[str, ...]
    stations: dict  # label -> (r, c)
    by_kind: dict  # kind letter -> [labels in numbering order]
    cell_label: dict  # (r, c) -> label, for counter cells
    spawns: tuple[tuple[int, int], tuple[int, int]]
    floor: frozenset
    reachable: tuple[frozenset, frozenset]  # floor cells reachable per spawn

    @property
    def height(self) -> int:
        return len(self.rows)

    @property
    def width(self) -> int:
        return len(self.rows[0])

    def access_cells(self, label: str) -> list[tuple[int, int]]:
        r, c = self.stations[label]
        cells = []
        for _, dr, dc in DIRECTIONS:
            cell = (r + dr, c + dc)
            if cell in self.floor:
                cells.append(cell)
        return cells

    def accessible_by(self, label: str) -> tuple[bool, bool]:
        cells = self.access_cells(label)
        return tuple(
            any(cell in region for cell in cells) for region in self.reachable
        )


def parse_layout(text: str, name: str = "custom") -> KitchenLayout:
    """Parse a layout grid, numbering stations and validating reachability."""
    rows = [line for line in text.splitlines() if line.strip("\r")]
    if not rows:
        raise MalformedGrid("empty layout")
    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise MalformedGrid("rows have unequal lengths")
    stations: dict[str, tuple[int, int]] = {}
    by_kind: dict[str, list[str]] = {k: [] for k in "opcdsk"}
    cell_label: dict[tuple[int, int], str] = {}
    spawns: dict[int, tuple[int, int]] = {}
    floor = set()
    for r, row in enumerate(rows):
        for c, ch in enumerate(row):
            if ch == " ":
                floor.add((r, c))
            elif ch.isdigit():
                if int(ch) in spawns:
                    raise MalformedGrid(f"duplicate spawn {ch}")
                spawns[int(ch)] = (r, c)
                floor.add((r, c))
            elif ch in STATION_KINDS:
                kind = STATION_KINDS[ch]
                label = f"{kind}{len(by_kind[kind])}"
                by_kind[kind].append(label)
                stations[label] = (r, c)
                if kind in ("s", "k"):
                    cell_label[(r, c)] = label
            else:
                raise MalformedGrid(f"unknown cell {ch!r} at {(r, c)}")
    if sorted(spawns) != [0, 1]:
        raise MalformedGrid("layout needs spawn points 0 and 1")
    if spawns[0] == spawns[1]:
        raise MalformedGrid("spawn points must be distinct")

    def flood(start):
        seen = {start}
        queue = deque([start])
        while queue:
            r, c = queue.popleft()
            for _, dr, dc in DIRECTIONS:
                cell = (r + dr, c + dc)
                if cell in floor and cell not in seen:
                    seen.add(cell)
                    queue.append(cell)
        return frozenset(seen)

    layout = KitchenLayout(
        name=name,
        rows=tuple(rows),
        stations=stations,
        by_kind={k: tuple(v) for k, v in by_kind.items()},
        cell_label=cell_label,
        spawns=(spawns[0], spawns[1]),
        floor=frozenset(floor),
        reachable=(flood(spawns[0]), flood(spawns[1])),
    )
    for label in stations:
        if label[0] == "k":
            continue  # plain counters double as walls; corners are fine
        a, b = layout.accessible_by(label)
        if not (a and b):
            warnings.warn(
                f"station {label} not reachable by "
                f"{'either spawn' if not (a or b) else ('spawn 1' if a else 'spawn 0')}",
                UnreachableStation,
                stacklevel=2,
            )
    return layout


@dataclass
class Cooker:
    onions: int = 0
    status: str = "off"  # off | cooking | cooked
    timer: Optional[int] = None

    def clone(self) -> "Cooker":
        return Cooker(self.onions, self.status, self.timer)


@dataclass
class KitchenState:
    layout: KitchenLayout
    positions: list[tuple[int, int]]
    facings: list[str]
    inventories: list[Optional[str]]  # None | onion | plate | soup
    cookers: list[Cooker]
    counters: dict  # counter label -> item
    tick_count: int = 0
    score: int = 0
    names: tuple[str, str] = DEFAULT_NAMES

    def clone(self) -> "KitchenState":
        return KitchenState(
            layout=self.layout,
            positions=list(self.positions),
            facings=list(self.facings),
            inventories=list(self.inventories),
            cookers=[c.clone() for c in self.cookers],
            counters=dict(self.counters),
            tick_count=self.tick_count,
            score=self.score,
            names=self.names,
        )


def initial_state(layout: KitchenLayout, names: tuple[str, str] = DEFAULT_NAMES) -> KitchenState:
    return KitchenState(
        layout=layout,
        positions=list(layout.spawns),
        facings=["down", "down"],
        inventories=[None, None],
        cookers=[Cooker() for _ in layout.by_kind["c"]],
        counters={},
        names=names,
    )


def bfs_distance(
    state: KitchenState,
    player: int,
    goals: set[tuple[int, int]],
    avoid_partner: bool = True,
) -> Optional[int]:
    """Shortest step count from the player's cell to any goal cell."""
    path = bfs_path(state, player, goals, avoid_partner)
    return None if path is None else len(path)


def bfs_path(
    state: KitchenState,
    player: int,
    goals: set[tuple[int, int]],
    avoid_partner: bool = True,
) -> Optional[list[str]]:
    """Deterministic BFS path (move names); ties prefer up, down, left, right."""
    if not goals:
        return None
    start = state.positions[player]
    blocked = {state.positions[1 - player]} if avoid_partner else set()
    if start in goals:
        return []
    floor = state.layout.floor
    parent: dict[tuple[int, int], tuple[tuple[int, int], str]] = {start: None}
    queue = deque([start])
    while queue:
        cell = queue.popleft()
        for name, dr, dc in DIRECTIONS:
            nxt = (cell[0] + dr, cell[1] + dc)
            if nxt in floor and nxt not in blocked and nxt not in parent:
                parent[nxt] = (cell, name)
                if nxt in goals:
                    moves = []
                    cur = nxt
                    while parent[cur] is not None:
                        cur, move = parent[cur]
                        moves.append(move)
                    return moves[::-1]
                queue.append(nxt)
    return None


@dataclass
class StationDistance:
    label: str
    distance: Optional[int]  # steps with the partner as an obstacle, if reachable
    blocked_by: Optional[str] = None  # partner name when only they are in the way
    inaccessible: bool = False


def station_distance(state: KitchenState, player: int, label: str) -> StationDistance:
    goals = set(state.layout.access_cells(label))
    d = bfs_distance(state, player, goals, avoid_partner=True)
    if d is not None:
        return StationDistance(label, d)
    d_free = bfs_distance(state, player, goals, avoid_partner=False)
    if d_free is not None:
        return StationDistance(label, d_free, blocked_by=state.names[1 - player])
    return StationDistance(label, None, inaccessible=True)


@dataclass
class MacroOption:
    label: str
    target: Optional[str]
    feasible: bool
    distance: Optional[int] = None
    blocked_by: Optional[str] = None
    inaccessible: bool = False


def closest_empty_plain_counter(state: KitchenState, player: int) -> Optional[str]:
    best = None
    for label in state.layout.by_kind["k"]:
        if state.counters.get(label):
            continue
        dist = station_distance(state, player, label)
        if dist.distance is None:
            continue
        if best is None or dist.distance < best[0]:
            best = (dist.distance, label)
    return None if best is None else best[1]


def macro_actions(state: KitchenState, player: int) -> list[MacroOption]:
    """Grammar-complete macro list with feasibility and distance annotations.

    Feasible means the inventory precondition holds, the target state accepts
    the interaction, and the target is not sealed off by the layout; a target
    merely blocked by the partner stays feasible (they can move).
    """
    inv = state.inventories[player]
    layout = state.layout
    options: list[MacroOption] = []

    def add(label: str, target: Optional[str], condition: bool):
        if target is None:
            options.append(MacroOption(label, None, condition, distance=0))
            return
        dist = station_distance(state, player, target)
        feasible = condition and not dist.inaccessible
        options.append(
            MacroOption(
                label,
                target,
                feasible,
                distance=dist.distance,
                blocked_by=dist.blocked_by,
                inaccessible=dist.inaccessible,
            )
        )

    for label in layout.by_kind["o"]:
        add(f"pick up onion from {label}.", label, inv is None)
    for label in layout.by_kind["p"]:
        add(f"pick up plate from {label}.", label, inv is None)
    for kind in ("s", "k"):
        for label in layout.by_kind[kind]:
            item = state.counters.get(label)
            if item in ("onion", "plate"):
                add(f"pick up {item} from {label}.", label, inv is None)
    for i, label in enumerate(layout.by_kind["c"]):
        cooker = state.cookers[i]
        add(
            f"pick up soup from {label}.",
            label,
            inv == "plate" and cooker.status == "cooked",
        )
        add(
            f"place onion in {label}.",
            label,
            inv == "onion" and cooker.status == "off" and cooker.onions < ONIONS_PER_SOUP,
        )
    if inv is not None:
        item_word = inv
        for label in layout.by_kind["s"]:
            add(
                f"place {item_word} on {label}.",
                label,
                not state.counters.get(label),
            )
        closest_k = closest_empty_plain_counter(state, player)
        if closest_k is not None:
            add(f"place {item_word} on {closest_k}.", closest_k, True)
    for label in layout.by_kind["d"]:
        add(f"deliver soup in {label}.", label, inv == "soup")
    options.append(MacroOption("wait.", None, True, distance=0))
    options.append(MacroOption("move away.", None, True, distance=0))
    return options


def feasible_macros(state: KitchenState, player: int) -> list[str]:
    return [opt.label for opt in macro_actions(state, player) if opt.feasible]


def _parse_macro_target(label: str) -> Optional[str]:
    if label in ("wait.", "move away."):
        return None
    return label.rstrip(".").rsplit(" ", 1)[-1]


def ground(state: KitchenState, player: int, macro: str) -> list[str]:
    """Expand a macro into primitives: path, orient, interact.

    Recomputed every tick by the executor, so paths adapt as the partner
    moves. A target sealed off by the layout raises :class:`NoPath`.
    """
    if macro == "wait.":
        return ["stay"]
    if macro == "move away.":
        pos = state.positions[player]
        partner = state.positions[1 - player]
        here = abs(pos[0] - partner[0]) + abs(pos[1] - partner[1])
        best = None
        for name, dr, dc in DIRECTIONS:
            cell = (pos[0] + dr, pos[1] + dc)
            if cell not in state.layout.floor or cell == partner:
                continue
            dist = abs(cell[0] - partner[0]) + abs(cell[1] - partner[1])
            if dist > here and (best is None or dist > best[0]):
                best = (dist, name)
        return [best[1]] if best else ["stay"]

    target = _parse_macro_target(macro)
    if target not in state.layout.stations:
        raise NoPath(f"unknown target in macro {macro!r}")
    goals = set(state.layout.access_cells(target))
    path = bfs_path(state, player, goals, avoid_partner=True)
    if path is None:
        path = bfs_path(state, player, goals, avoid_partner=False)
    if path is None:
        raise NoPath(f"{target} is inaccessible")
    prims = list(path)
    # orientation: face the station from the access cell we will stand on
    pos = state.positions[player]
    for move in path:
        dr, dc = DELTA[move]
        pos = (pos[0] + dr, pos[1] + dc)
    sr, sc = state.layout.stations[target]
    need = None
    for name, dr, dc in DIRECTIONS:
        if (pos[0] + dr, pos[1] + dc) == (sr, sc):
            need = name
            break
    if need is None:
        raise NoPath(f"no adjacent approach to {target}")
    facing = path[-1] if path else state.facings[player]
    if facing != need:
        prims.append(need)  # bump into the station to turn toward it
    prims.append("interact")
    return prims


def _interact(state: KitchenState, player: int) -> None:
    r, c = state.positions[player]
    dr, dc = DELTA[state.facings[player]]
    cell = (r + dr, c + dc)
    layout = state.layout
    label = None
    for name, pos in layout.stations.items():
        if pos == cell:
            label = name
            break
    if label is None:
        return
    kind = label[0]
    inv = state.inventories[player]
    if kind == "o" and inv is None:
        state.inventories[player] = "onion"
    elif kind == "p" and inv is None:
        state.inventories[player] = "plate"
    elif kind == "c":
        cooker = state.cookers[layout.by_kind["c"].index(label)]
        if inv == "onion" and cooker.status == "off" and cooker.onions < ONIONS_PER_SOUP:
            cooker.onions += 1
            state.inventories[player] = None
            if cooker.onions == ONIONS_PER_SOUP:
                cooker.status = "cooking"
                cooker.timer = COOK_TICKS
        elif inv == "plate" and cooker.status == "cooked":
            state.inventories[player] = "soup"
            cooker.onions = 0
            cooker.status = "off"
            cooker.timer = None
    elif kind == "d" and inv == "soup":
        state.inventories[player] = None
        state.score += DELIVERY_POINTS
    elif kind in ("s", "k"):
        held = state.counters.get(label)
        if inv is None and held:
            state.inventories[player] = held
            del state.counters[label]
        elif inv is not None and not held:
            state.counters[label] = inv
            state.inventories[player] = None


def tick(state: KitchenState, moves: tuple[str, str]) -> KitchenState:
    """Advance one time step: timers, simultaneous movement, then interacts."""
    nxt = state.clone()
    for cooker in nxt.cookers:
        if cooker.status == "cooking":
            cooker.timer -= 1
            if cooker.timer <= 0:
                cooker.status = "cooked"
                cooker.timer = None

    proposed = []
    for player, move in enumerate(moves):
        pos = nxt.positions[player]
        if move in DELTA:
            nxt.facings[player] = move
            dr, dc = DELTA[move]
            cell = (pos[0] + dr, pos[1] + dc)
            proposed.append(cell if cell in nxt.layout.floor else pos)
        else:
            proposed.append(pos)
    p0, p1 = proposed
    orig0, orig1 = nxt.positions
    # same target or swap: both stay (a stationary partner is the same-target case)
    if p0 == p1 or (p0 == orig1 and p1 == orig0):
        p0, p1 = orig0, orig1
    nxt.positions = [p0, p1]

    for player, move in enumerate(moves):
        if move == "interact":
            _interact(nxt, player)
    nxt.tick_count += 1
    return nxt


def state_to_dict(state: KitchenState) -> dict:
    return {
        "layout_name": state.layout.name,
        "layout_rows": list(state.layout.rows),
        "positions": [list(p) for p in state.positions],
        "facings": list(state.facings),
        "inventories": list(state.inventories),
        "cookers": [
            {"onions": c.onions, "status": c.status, "timer": c.timer}
            for c in state.cookers
        ],
        "counters": dict(state.counters),
        "tick": state.tick_count,
        "score": state.score,
        "names": list(state.names),
    }


def state_from_dict(doc: dict) -> KitchenState:
    layout = parse_layout("\n".join(doc["layout_rows"]), name=doc["layout_name"])
    return KitchenState(
        layout=layout,
        positions=[tuple(p) for p in doc["positions"]],
        facings=list(doc["facings"]),
        inventories=list(doc["inventories"]),
        cookers=[Cooker(c["onions"], c["status"], c["timer"]) for c in doc["cookers"]],
        counters=dict(doc["counters"]),
        tick_count=doc["tick"],
        score=doc["score"],
        names=tuple(doc["names"]),
    )
