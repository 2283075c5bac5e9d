"""Hanabi state machine: two players, five colors, per-card knowledge tracking.

The deck holds 50 cards (per color: three 1's, two 2's, two 3's, two 4's,
one 5). Players see only the partner's hand; their view of their own cards is
the plausible-set knowledge maintained here. New cards enter a hand on the
right; indices re-label left-to-right after a removal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from .core import ActionId, IllegalAction, TerminalState, DEFAULT_NAMES
from .rng import make_rng

COLORS = ("Red", "Yellow", "Green", "White", "Blue")
RANKS = (1, 2, 3, 4, 5)
RANK_COUNTS = {1: 3, 2: 2, 3: 2, 4: 2, 5: 1}
HAND_SIZE = 5
MAX_TOKENS = 8
MAX_LIVES = 3
PLAYER_COUNT = 2
DECK_TOTAL = 50


class Card(NamedTuple):
    color: int  # index into COLORS
    rank: int  # 1..5

    @property
    def label(self) -> str:
        return f"{COLORS[self.color]} {self.rank}"


@dataclass
class CardKnowledge:
    """What the holder can deduce about one of their cards from clues."""

    colors: set[int] = field(default_factory=lambda: set(range(len(COLORS))))
    ranks: set[int] = field(default_factory=lambda: set(RANKS))
    touched: bool = False  # ever pointed at by a positive clue

    def clone(self) -> "CardKnowledge":
        return CardKnowledge(set(self.colors), set(self.ranks), self.touched)


@dataclass
class HanabiState:
    deck: list[Card]
    hands: list[list[Card]]
    knowledge: list[list[CardKnowledge]]
    stacks: list[int]  # top rank per color, 0 = empty
    discard_pile: list[Card]
    reveal_tokens: int
    lives: int
    current_player: int
    final_turns_remaining: Optional[int]
    history: list[list[str]]  # per player, own past actions in history form
    names: tuple[str, str] = DEFAULT_NAMES
    # most recent clue while still fresh: (target player, touched indices)
    last_reveal: Optional[tuple[int, tuple[int, ...]]] = None

    def clone(self) -> "HanabiState":
        return HanabiState(
            deck=list(self.deck),
            hands=[list(h) for h in self.hands],
            knowledge=[[k.clone() for k in ks] for ks in self.knowledge],
            stacks=list(self.stacks),
            discard_pile=list(self.discard_pile),
            reveal_tokens=self.reveal_tokens,
            lives=self.lives,
            current_player=self.current_player,
            final_turns_remaining=self.final_turns_remaining,
            history=[list(h) for h in self.history],
            names=self.names,
            last_reveal=self.last_reveal,
        )


@dataclass
class Outcome:
    """What a transition did, for event logs and traces."""

    kind: str  # play-success, play-failure, discard, reveal
    card: Optional[Card] = None
    drew: Optional[Card] = None
    token_delta: int = 0


def build_deck() -> list[Card]:
    deck = []
    for color in range(len(COLORS)):
        for rank in RANKS:
            deck.extend([Card(color, rank)] * RANK_COUNTS[rank])
    return deck


def deal(seed: int, names: tuple[str, str] = DEFAULT_NAMES) -> HanabiState:
    """Shuffle a fresh deck and deal five cards to each player."""
    deck = build_deck()
    make_rng(seed).shuffle(deck)
    hands: list[list[Card]] = [[], []]
    knowledge: list[list[CardKnowledge]] = [[], []]
    for player in range(PLAYER_COUNT):
        for _ in range(HAND_SIZE):
            hands[player].append(deck.pop())
            knowledge[player].append(CardKnowledge())
    return HanabiState(
        deck=deck,
        hands=hands,
        knowledge=knowledge,
        stacks=[0] * len(COLORS),
        discard_pile=[],
        reveal_tokens=MAX_TOKENS,
        lives=MAX_LIVES,
        current_player=0,
        final_turns_remaining=None,
        history=[[], []],
        names=names,
    )


def is_terminal(state: HanabiState) -> bool:
    return (
        state.lives == 0
        or all(top == 5 for top in state.stacks)
        or state.final_turns_remaining == 0
    )


def score(state: HanabiState) -> int:
    """Terminal and mid-game score: 0 on a bomb-out, else sum of stack tops."""
    if state.lives == 0:
        return 0
    return sum(state.stacks)


def next_playable(state: HanabiState) -> list[Optional[int]]:
    """Next rank needed per color; None marks a completed stack."""
    return [None if top == 5 else top + 1 for top in state.stacks]


def legal_actions(state: HanabiState) -> list[ActionId]:
    """Reveals (colors then ranks, only targets present), plays, discards.

    Reveals need a token; discards are barred at the 8-token cap.
    """
    if is_terminal(state):
        raise TerminalState("no legal actions in a terminal state")
    me = state.current_player
    partner = 1 - me
    partner_name = state.names[partner]
    labels: list[str] = []
    if state.reveal_tokens > 0:
        present_colors = {card.color for card in state.hands[partner]}
        for color in range(len(COLORS)):
            if color in present_colors:
                labels.append(f"Reveal {partner_name}'s {COLORS[color]} color cards")
        present_ranks = {card.rank for card in state.hands[partner]}
        for rank in RANKS:
            if rank in present_ranks:
                labels.append(f"Reveal {partner_name}'s rank {rank} cards")
    for i in range(len(state.hands[me])):
        labels.append(f"Play my Card {i}")
    if state.reveal_tokens < MAX_TOKENS:
        for i in range(len(state.hands[me])):
            labels.append(f"Discard my Card {i}")
    return [ActionId("hanabi", i, label) for i, label in enumerate(labels)]


def _history_form(state: HanabiState, label: str) -> str:
    """Convert an action label to the compact form used in action history."""
    partner = state.names[1 - state.current_player]
    if label.startswith("Play my Card "):
        return "Play Card " + label.removeprefix("Play my Card ")
    if label.startswith("Discard my Card "):
        return "Discard Card " + label.removeprefix("Discard my Card ")
    prefix = f"Reveal {partner}'s "
    rest = label.removeprefix(prefix)
    if rest.startswith("rank "):
        return f"Reveal {partner}'s Rank {rest.removeprefix('rank ').removesuffix(' cards')} Cards"
    return f"Reveal {partner}'s {rest.removesuffix(' color cards')} Color Cards"


def _draw(state: HanabiState, player: int) -> Optional[Card]:
    if not state.deck:
        return None
    card = state.deck.pop()
    state.hands[player].append(card)
    state.knowledge[player].append(CardKnowledge())
    return card


def apply_action(state: HanabiState, action: ActionId) -> tuple[HanabiState, Outcome]:
    """Apply one legal action, returning the successor state and outcome."""
    legal = {a.label for a in legal_actions(state)}
    if action.label not in legal:
        raise IllegalAction(f"{action.label!r} is not legal here")
    nxt = state.clone()
    me = nxt.current_player
    partner = 1 - me
    was_final = nxt.final_turns_remaining is not None
    label = action.label
    nxt.history[me].append(_history_form(nxt, label))

    if label.startswith("Play my Card "):
        nxt.last_reveal = None
        idx = int(label.removeprefix("Play my Card "))
        card = nxt.hands[me].pop(idx)
        del nxt.knowledge[me][idx]
        if card.rank == nxt.stacks[card.color] + 1:
            nxt.stacks[card.color] = card.rank
            delta = 0
            if card.rank == 5 and nxt.reveal_tokens < MAX_TOKENS:
                nxt.reveal_tokens += 1
                delta = 1
            outcome = Outcome("play-success", card=card, token_delta=delta)
        else:
            nxt.discard_pile.append(card)
            nxt.lives -= 1
            outcome = Outcome("play-failure", card=card)
        outcome.drew = _draw(nxt, me)
    elif label.startswith("Discard my Card "):
        nxt.last_reveal = None
        idx = int(label.removeprefix("Discard my Card "))
        card = nxt.hands[me].pop(idx)
        del nxt.knowledge[me][idx]
        nxt.discard_pile.append(card)
        nxt.reveal_tokens += 1
        outcome = Outcome("discard", card=card, token_delta=1)
        outcome.drew = _draw(nxt, me)
    else:
        nxt.reveal_tokens -= 1
        touched = []
        rest = label.removeprefix(f"Reveal {nxt.names[partner]}'s ")
        if rest.startswith("rank "):
            rank = int(rest.removeprefix("rank ").removesuffix(" cards"))
            for i, (card, know) in enumerate(zip(nxt.hands[partner], nxt.knowledge[partner])):
                if card.rank == rank:
                    know.ranks = {rank}
                    know.touched = True
                    touched.append(i)
                else:
                    know.ranks.discard(rank)
        else:
            color = COLORS.index(rest.removesuffix(" color cards"))
            for i, (card, know) in enumerate(zip(nxt.hands[partner], nxt.knowledge[partner])):
                if card.color == color:
                    know.colors = {color}
                    know.touched = True
                    touched.append(i)
                else:
                    know.colors.discard(color)
        nxt.last_reveal = (partner, tuple(touched))
        outcome = Outcome("reveal", token_delta=-1)

    if was_final:
        nxt.final_turns_remaining -= 1
    elif not nxt.deck:
        nxt.final_turns_remaining = PLAYER_COUNT
    nxt.current_player = partner
    return nxt, outcome


def state_to_dict(state: HanabiState) -> dict:
    return {
        "deck": [[c.color, c.rank] for c in state.deck],
        "hands": [[[c.color, c.rank] for c in h] for h in state.hands],
        "knowledge": [
            [
                {"colors": sorted(k.colors), "ranks": sorted(k.ranks), "touched": k.touched}
                for k in ks
            ]
            for ks in state.knowledge
        ],
        "stacks": list(state.stacks),
        "discard_pile": [[c.color, c.rank] for c in state.discard_pile],
        "reveal_tokens": state.reveal_tokens,
        "lives": state.lives,
        "current_player": state.current_player,
        "final_turns_remaining": state.final_turns_remaining,
        "history": [list(h) for h in state.history],
        "names": list(state.names),
    }


def state_from_dict(doc: dict) -> HanabiState:
    return HanabiState(
        deck=[Card(*c) for c in doc["deck"]],
        hands=[[Card(*c) for c in h] for h in doc["hands"]],
        knowledge=[
            [
                CardKnowledge(set(k["colors"]), set(k["ranks"]), k["touched"])
                for k in ks
            ]
            for ks in doc["knowledge"]
        ],
        stacks=list(doc["stacks"]),
        discard_pile=[Card(*c) for c in doc["discard_pile"]],
        reveal_tokens=doc["reveal_tokens"],
        lives=doc["lives"],
        current_player=doc["current_player"],
        final_turns_remaining=doc["final_turns_remaining"],
        history=[list(h) for h in doc["history"]],
        names=tuple(doc["names"]),
    )


def check_invariants(state: HanabiState) -> None:
    """Raise AssertionError on any structural violation (used by playout tests)."""
    total = (
        len(state.deck)
        + sum(len(h) for h in state.hands)
        + len(state.discard_pile)
        + sum(state.stacks)
    )
    assert total == DECK_TOTAL, f"card conservation broken: {total}"
    assert 0 <= state.reveal_tokens <= MAX_TOKENS, state.reveal_tokens
    assert 0 <= state.lives <= MAX_LIVES, state.lives
    for hand, knows in zip(state.hands, state.knowledge):
        assert len(hand) == len(knows), "knowledge misaligned with hand"
        for card, know in zip(hand, knows):
            assert card.color in know.colors, f"{card.label} outside color knowledge"
            assert card.rank in know.ranks, f"{card.label} outside rank knowledge"
