"""Deterministic scripted decision sources.

These are baselines and test partners: a uniform-random legal player, a
convention-following Hanabi bot, a debug Hanabi oracle that reads its own
hand, a greedy kitchen chef, and a greedy pursuit agent. All tie-breaks are
fixed so episodes replay bit-for-bit.
"""

from __future__ import annotations

from typing import Optional

from . import hanabi, kitchen, pursuit
from .core import ActionId
from .rng import Pcg32, make_rng

POLICY_NAMES = (
    "random-legal",
    "rule-hanabi",
    "oracle-hanabi",
    "greedy-kitchen",
    "greedy-pursuit",
)


def _by_label(legal: list[ActionId], label: str) -> ActionId:
    for action in legal:
        if action.label == label:
            return action
    raise KeyError(label)


# --- Hanabi helpers ----------------------------------------------------------


def _known_playable(state: hanabi.HanabiState, know: hanabi.CardKnowledge) -> bool:
    """Every identity the holder considers possible is playable right now."""
    for color in know.colors:
        need = state.stacks[color] + 1
        if need > 5:
            return False
        for rank in know.ranks:
            if rank != need:
                return False
    return True


def _simulate_clue(state: hanabi.HanabiState, partner: int, kind: str, value) -> int:
    """How many partner cards become known-playable from this clue."""
    gained = 0
    for card, know in zip(state.hands[partner], state.knowledge[partner]):
        if _known_playable(state, know):
            continue
        colors, ranks = set(know.colors), set(know.ranks)
        if kind == "color":
            if card.color == value:
                colors = {value}
            else:
                colors.discard(value)
        else:
            if card.rank == value:
                ranks = {value}
            else:
                ranks.discard(value)
        if _known_playable(state, hanabi.CardKnowledge(colors, ranks)):
            gained += 1
    return gained


def _clue_target_set(state: hanabi.HanabiState, partner: int, label: str) -> list[int]:
    rest = label.removeprefix(f"Reveal {state.names[partner]}'s ")
    if rest.startswith("rank "):
        rank = int(rest.split()[1])
        return [i for i, c in enumerate(state.hands[partner]) if c.rank == rank]
    color = hanabi.COLORS.index(rest.removesuffix(" color cards"))
    return [i for i, c in enumerate(state.hands[partner]) if c.color == color]


def _might_be_playable(state: hanabi.HanabiState, know: hanabi.CardKnowledge) -> bool:
    return any(
        state.stacks[c] + 1 == r for c in know.colors for r in know.ranks
    )


def rule_hanabi(state: hanabi.HanabiState, player: int, legal: list[ActionId]) -> ActionId:
    """Honest convention bot.

    Priority: play a card whose knowledge makes it certainly playable; trust a
    fresh clue as a play clue (newest touched card); give a strict play clue
    (every touched card playable right now); discard the oldest unclued card.
    """
    knowledge = state.knowledge[player]
    for i, know in enumerate(knowledge):
        if _known_playable(state, know):
            return _by_label(legal, f"Play my Card {i}")
    if state.last_reveal is not None and state.last_reveal[0] == player:
        fresh = [
            i
            for i in state.last_reveal[1]
            if i < len(knowledge) and _might_be_playable(state, knowledge[i])
        ]
        if fresh:
            return _by_label(legal, f"Play my Card {max(fresh)}")
    partner = 1 - player
    partner_name = state.names[partner]
    reveals = [a for a in legal if a.label.startswith("Reveal ")]
    if reveals:
        # strict play clues: everything the clue touches is playable now
        best: Optional[tuple[int, int, str]] = None
        for action in reveals:
            touched = _clue_target_set(state, partner, action.label)
            if not touched:
                continue
            if any(
                state.stacks[state.hands[partner][i].color] + 1
                != state.hands[partner][i].rank
                for i in touched
            ):
                continue
            if all(_known_playable(state, state.knowledge[partner][i]) for i in touched):
                continue  # nothing new; do not repeat known information
            rest = action.label.removeprefix(f"Reveal {partner_name}'s ")
            if rest.startswith("rank "):
                gained = _simulate_clue(state, partner, "rank", int(rest.split()[1]))
            else:
                color = hanabi.COLORS.index(rest.removesuffix(" color cards"))
                gained = _simulate_clue(state, partner, "color", color)
            key = (gained, len(touched))
            if best is None or key > best[:2]:
                best = (*key, action.label)
        if best is not None:
            return _by_label(legal, best[2])
    if state.reveal_tokens < hanabi.MAX_TOKENS:
        untouched = [i for i, know in enumerate(knowledge) if not know.touched]
        idx = min(untouched) if untouched else 0
        return _by_label(legal, f"Discard my Card {idx}")
    # token cap, nothing playable or cluable: stall with the clue least
    # readable as a play clue so the partner will not misplay from it
    return _safest_reveal(state, player, legal)


def _copies_gone(state: hanabi.HanabiState, color: int, rank: int) -> int:
    return sum(1 for c in state.discard_pile if c.color == color and c.rank == rank)


def _dead(state: hanabi.HanabiState, card: hanabi.Card) -> bool:
    """Already played, or some lower rank of its color is fully discarded."""
    if state.stacks[card.color] >= card.rank:
        return True
    for rank in range(state.stacks[card.color] + 1, card.rank):
        if _copies_gone(state, card.color, rank) == hanabi.RANK_COUNTS[rank]:
            return True
    return False


def _critical(state: hanabi.HanabiState, card: hanabi.Card) -> bool:
    if _dead(state, card):
        return False
    return (
        hanabi.RANK_COUNTS[card.rank] - _copies_gone(state, card.color, card.rank)
        == 1
    )


def _safest_reveal(state: hanabi.HanabiState, player: int, legal: list[ActionId]) -> ActionId:
    """Stall clue least readable as a play clue, so a convention-following
    partner will not misplay from it."""
    partner = 1 - player
    partner_name = state.names[partner]
    reveals = [a for a in legal if a.label.startswith("Reveal ")]

    def misread_risk(action: ActionId) -> tuple[int, int]:
        touched = _clue_target_set(state, partner, action.label)
        risky = 0
        for i in touched:
            know = state.knowledge[partner][i].clone()
            rest = action.label.removeprefix(f"Reveal {partner_name}'s ")
            if rest.startswith("rank "):
                know.ranks = {int(rest.split()[1])}
            else:
                know.colors = {hanabi.COLORS.index(rest.removesuffix(" color cards"))}
            if _might_be_playable(state, know):
                risky += 1
        return (risky, len(touched))

    return min(reveals, key=lambda a: (misread_risk(a), a.index))


def oracle_hanabi(state: hanabi.HanabiState, player: int, legal: list[ActionId]) -> ActionId:
    """Debug oracle with full sight of its own hand; never misplays."""
    hand = state.hands[player]
    playable = [
        (card.rank, i)
        for i, card in enumerate(hand)
        if state.stacks[card.color] + 1 == card.rank
    ]
    if playable:
        return _by_label(legal, f"Play my Card {min(playable)[1]}")
    can_discard = state.reveal_tokens < hanabi.MAX_TOKENS
    if can_discard:
        dead = [i for i, card in enumerate(hand) if _dead(state, card)]
        if dead:
            return _by_label(legal, f"Discard my Card {dead[0]}")
        # discard duplicates held twice in this very hand: one copy is spare
        seen = {}
        for i, card in enumerate(hand):
            if card in seen:
                return _by_label(legal, f"Discard my Card {i}")
            seen[card] = i
    if state.reveal_tokens > 0:
        return _safest_reveal(state, player, legal)
    non_critical = [i for i, card in enumerate(hand) if not _critical(state, card)]
    if non_critical:
        return _by_label(legal, f"Discard my Card {non_critical[0]}")
    # forced sacrifice: drop the highest rank, it blocks the least
    idx = max(range(len(hand)), key=lambda i: (hand[i].rank, i))
    return _by_label(legal, f"Discard my Card {idx}")


# --- Kitchen -----------------------------------------------------------------


def _nearest(options, prefixes) -> Optional[kitchen.MacroOption]:
    """Closest feasible option among label prefixes; unblocked beats blocked."""
    best = None
    for opt in options:
        if not opt.feasible or opt.distance is None:
            continue
        if not any(opt.label.startswith(p) for p in prefixes):
            continue
        key = (opt.blocked_by is not None, opt.distance, opt.label)
        if best is None or key < best[0]:
            best = (key, opt)
    return None if best is None else best[1]


def _camping_hot_cooker(state: kitchen.KitchenState, player: int) -> bool:
    """Standing on the access cell of a cooker that is cooking or cooked."""
    pos = state.positions[player]
    for i, label in enumerate(state.layout.by_kind["c"]):
        if state.cookers[i].status in ("cooking", "cooked"):
            if pos in state.layout.access_cells(label):
                return True
    return False


def greedy_kitchen(state: kitchen.KitchenState, player: int, legal: list[ActionId]) -> ActionId:
    """Fetch onions, fill cookers, plate, deliver; partner-aware plate duty."""
    options = [o for o in kitchen.macro_actions(state, player) if o.feasible]
    labels = {a.label for a in legal}

    def pick(label: Optional[str]) -> Optional[ActionId]:
        if label is not None and label in labels:
            return _by_label(legal, label)
        return None

    def idle() -> ActionId:
        # never camp the cell the plate carrier will need
        if _camping_hot_cooker(state, player):
            return _by_label(legal, "move away.")
        return _by_label(legal, "wait.")

    inv = state.inventories[player]
    partner_inv = state.inventories[1 - player]
    cooked = any(c.status == "cooked" for c in state.cookers)
    cooking = any(c.status == "cooking" for c in state.cookers)

    if inv == "soup":
        target = _nearest(options, ("deliver soup in ",))
        return pick(target.label if target else None) or idle()
    cooker_reachable = any(
        not kitchen.station_distance(state, player, label).inaccessible
        for label in state.layout.by_kind["c"]
    )
    if inv == "plate":
        target = _nearest(options, ("pick up soup from ",))
        if target:
            return _by_label(legal, target.label)
        if not cooker_reachable:
            # hand the plate across a shared counter to whoever can plate
            target = _nearest(options, ("place plate on s",))
            if target:
                return _by_label(legal, target.label)
        if cooking:
            return _by_label(legal, "wait.")
        target = _nearest(options, ("place plate on ",))
        return pick(target.label if target else None) or idle()
    if inv == "onion":
        target = _nearest(options, ("place onion in ",))
        if target:
            return _by_label(legal, target.label)
        if cooking or cooked:
            return idle()
        target = _nearest(options, ("place onion on s",))
        return pick(target.label if target else None) or idle()

    # empty-handed: split plating duty from onion running
    plate_target = _nearest(options, ("pick up plate from ",))
    onion_target = _nearest(options, ("pick up onion from ",))
    if (cooked or cooking) and partner_inv != "plate" and plate_target is not None:
        partner_options = (
            [o for o in kitchen.macro_actions(state, 1 - player) if o.feasible]
            if partner_inv is None
            else []
        )
        partner_plate = _nearest(partner_options, ("pick up plate from ",))
        closer = partner_plate is None or (
            plate_target.distance < partner_plate.distance
            or (plate_target.distance == partner_plate.distance and player == 0)
        )
        if closer:
            return _by_label(legal, plate_target.label)
    if onion_target is not None:
        return _by_label(legal, onion_target.label)
    if plate_target is not None and (cooked or cooking):
        return _by_label(legal, plate_target.label)
    return idle()


# --- Pursuit -----------------------------------------------------------------


def _pursuit_step_toward(
    state: pursuit.PursuitState, player: int, target: int
) -> Optional[str]:
    room = state.agent_rooms[player]
    dist = pursuit.open_distances(state, target)
    if room not in dist and target != room:
        return None
    options = [n for n in pursuit.open_neighbors(state, room) if n in dist]
    if not options:
        return None
    key = (lambda n: (dist[n], n)) if player == 0 else (lambda n: (dist[n], -n))
    best = min(options, key=key)
    if dist.get(room, 10**9) <= dist[best]:
        return None
    return f"Move to Room {best}"


def greedy_pursuit(state: pursuit.PursuitState, player: int, legal: list[ActionId]) -> ActionId:
    labels = {a.label for a in legal}
    if state.mode == "capture":
        move = _pursuit_step_toward(state, player, state.adversary_room)
        if move and move in labels:
            return _by_label(legal, move)
        return _by_label(legal, "Stay in current Room")
    if "Fix the generator" in labels:
        return _by_label(legal, "Fix the generator")
    if "Exit through the gate" in labels:
        return _by_label(legal, "Exit through the gate")
    unfixed = pursuit.unfixed_generators(state)
    targets = unfixed if unfixed else (
        [state.graph.gate_room] if state.gate_open else []
    )
    for target in targets:
        move = _pursuit_step_toward(state, player, target)
        if move and move in labels:
            return _by_label(legal, move)
    return _by_label(legal, "Stay in current Room")


# --- Agent adapters ----------------------------------------------------------


class ScriptedAgent:
    """Wraps a named policy behind the episode Agent protocol."""

    last_latency = 0.0

    def __init__(self, policy: str, seed: int = 0):
        if policy not in POLICY_NAMES:
            raise ValueError(f"unknown policy {policy!r}; have {POLICY_NAMES}")
        self.policy = policy
        self.seed = seed
        self.name = f"scripted:{policy}"
        self._rng: Pcg32 = make_rng(seed)

    def reset(self) -> None:
        self._rng = make_rng(self.seed)

    def decide(self, env, state, player, legal, observation, partner_last) -> ActionId:
        if self.policy == "random-legal":
            return legal[self._rng.randrange(len(legal))]
        if self.policy == "rule-hanabi":
            return rule_hanabi(state, player, legal)
        if self.policy == "oracle-hanabi":
            return oracle_hanabi(state, player, legal)
        if self.policy == "greedy-kitchen":
            return greedy_kitchen(state.board, player, legal)
        if self.policy == "greedy-pursuit":
            return greedy_pursuit(state, player, legal)
        raise AssertionError(self.policy)


class ReplayAgent:
    """Plays a fixed label script; raises when the script runs dry."""

    last_latency = 0.0

    def __init__(self, labels: list[str], name: str = "replay-agent"):
        self.labels = list(labels)
        self.name = name
        self._cursor = 0

    def reset(self) -> None:
        self._cursor = 0

    def decide(self, env, state, player, legal, observation, partner_last) -> ActionId:
        from .core import AgentFailure

        if self._cursor >= len(self.labels):
            raise AgentFailure(f"{self.name}: script exhausted")
        label = self.labels[self._cursor]
        self._cursor += 1
        for action in legal:
            if action.label == label:
                return action
        raise AgentFailure(f"{self.name}: scripted {label!r} not legal")
