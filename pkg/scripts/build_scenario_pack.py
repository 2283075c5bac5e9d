"""Regenerate the bundled scenario pack (src/coord_arena/data/scenarios.jsonl).

Each scenario is built through the engines so the stored states re-load
valid; gold answers are validated against the rendered options before the
pack is written.
"""

from __future__ import annotations

import sys
from collections import Counter
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from coord_arena import hanabi, kitchen, pursuit, qa
from coord_arena.envs import builtin_layout, builtin_map
from coord_arena.hanabi import Card, CardKnowledge

R, Y, G, W, B = range(5)
OUT = Path(__file__).parent.parent / "src" / "coord_arena" / "data" / "scenarios.jsonl"


def build_hanabi_state(
    hands,
    stacks=(0, 0, 0, 0, 0),
    discard=(),
    tokens=8,
    lives=3,
    history=((), ()),
    knowledge=None,
    last_reveal=None,
):
    """Assemble a consistent state: the deck is whatever the rest leaves over."""
    used = Counter()
    for hand in hands:
        used.update(hand)
    for card in discard:
        used.update([card])
    for color, top in enumerate(stacks):
        for rank in range(1, top + 1):
            used.update([Card(color, rank)])
    deck = []
    for card in sorted(set(hanabi.build_deck())):
        total = hanabi.RANK_COUNTS[card.rank]
        left = total - used[card]
        assert left >= 0, f"overused {card}"
        deck.extend([card] * left)
    if knowledge is None:
        knowledge = [[CardKnowledge() for _ in hand] for hand in hands]
    state = hanabi.HanabiState(
        deck=deck,
        hands=[list(h) for h in hands],
        knowledge=knowledge,
        stacks=list(stacks),
        discard_pile=list(discard),
        reveal_tokens=tokens,
        lives=lives,
        current_player=0,
        final_turns_remaining=None,
        history=[list(h) for h in history],
        last_reveal=last_reveal,
    )
    hanabi.check_invariants(state)
    return state


def kitchen_state(layout_name, positions, inventories, cookers=(), counters=()):
    state = kitchen.initial_state(builtin_layout(layout_name))
    state.positions = list(positions)
    state.inventories = list(inventories)
    for index, onions, status, timer in cookers:
        state.cookers[index] = kitchen.Cooker(onions, status, timer)
    for label, item in counters:
        state.counters[label] = item
    return state


def record(rec_id, game, state_doc, acting=0, map_text=None, **payloads):
    return qa.ScenarioRecord(
        id=rec_id,
        game=game,
        acting_player=acting,
        state_doc=state_doc,
        map_text=map_text,
        **payloads,
    )


def map_text_of(name):
    from importlib import resources

    return (
        resources.files("coord_arena")
        .joinpath(f"data/maps/{name}.map")
        .read_text(encoding="utf-8")
    )


records = []

# --- kitchen ------------------------------------------------------------------

k1 = kitchen_state(
    "twin_galley",
    positions=[(1, 2), (3, 2)],
    inventories=["onion", None],
    cookers=[(0, 1, "off", None)],
    counters=[("s1", "onion"), ("s0", "plate")],
)
records.append(
    record(
        "kitchen-galley-pass",
        "kitchen",
        kitchen.state_to_dict(k1),
        ec={
            "question": "How many onions are still needed to fill up c0?",
            "options": ["4 or more.", "3.", "2.", "1.", "0."],
            "gold": 2,
        },
        tom={"variant": "intent", "gold": "pick up onion from s1."},
        jp={"gold": "place onion on s2."},
    )
)

k2 = kitchen_state(
    "cramped_room",
    positions=[(2, 1), (1, 3)],
    inventories=[None, None],
    cookers=[(0, 3, "cooking", 5)],
)
records.append(
    record(
        "kitchen-cramped-cooking",
        "kitchen",
        kitchen.state_to_dict(k2),
        ec={
            "question": "Is the soup in c0 ready to be picked up?",
            "options": [
                "Yes, the soup is cooked.",
                "No, it is still cooking.",
                "No, the cooker is empty.",
            ],
            "gold": 1,
        },
        tom={"variant": "intent", "gold": "pick up onion from o1."},
        jp={"gold": "pick up plate from p0."},
    )
)

k3 = kitchen_state(
    "forced_coordination",
    positions=[(1, 3), (2, 1)],
    inventories=[None, "onion"],
    counters=[("s0", "onion"), ("s2", "plate")],
)
records.append(
    record(
        "kitchen-forced-handoff",
        "kitchen",
        kitchen.state_to_dict(k3),
        ec={
            "question": "Can I reach an onion dispenser from my position?",
            "options": [
                "Yes, o0 is reachable.",
                "Yes, o1 is reachable.",
                "No, the onion dispensers are inaccessible to me.",
            ],
            "gold": 2,
        },
        tom={"variant": "intent", "gold": "place onion on s1."},
        jp={"gold": "pick up onion from s0."},
    )
)

k4 = kitchen_state(
    "asymmetric_advantages",
    positions=[(2, 3), (2, 5)],
    inventories=["plate", "onion"],
    cookers=[(0, 3, "cooked", None)],
)
records.append(
    record(
        "kitchen-asym-plating",
        "kitchen",
        kitchen.state_to_dict(k4),
        ec={
            "question": "Which cooker should the next onion go into?",
            "options": ["c0.", "c1.", "Either cooker."],
            "gold": 1,
        },
        tom={"variant": "intent", "gold": "place onion in c1."},
        jp={"gold": "pick up soup from c0."},
    )
)

# --- hanabi -------------------------------------------------------------------

h1 = build_hanabi_state(
    hands=[
        [Card(Y, 1), Card(G, 2), Card(R, 1), Card(B, 3), Card(W, 2)],
        [Card(R, 3), Card(W, 1), Card(G, 3), Card(W, 4), Card(B, 4)],
    ],
)
records.append(
    record(
        "hanabi-opening-clue",
        "hanabi",
        hanabi.state_to_dict(h1),
        ec={
            "question": "How many of Bob's cards are immediately playable on the stacks?",
            "options": ["0.", "1.", "2.", "3."],
            "gold": 1,
        },
        tom={"variant": "reveal", "gold": "Reveal Bob's rank 1 cards."},
        jp={"gold": "Reveal Bob's rank 1 cards"},
    )
)

h2_know = [
    [CardKnowledge() for _ in range(5)],
    [CardKnowledge() for _ in range(5)],
]
for i, know in enumerate(h2_know[0]):
    if i == 1:
        know.ranks = {2}
        know.touched = True
    else:
        know.ranks.discard(2)
h2 = build_hanabi_state(
    hands=[
        [Card(Y, 4), Card(R, 2), Card(G, 3), Card(B, 1), Card(W, 3)],
        [Card(R, 4), Card(Y, 1), Card(G, 1), Card(W, 1), Card(B, 2)],
    ],
    stacks=(1, 0, 0, 0, 0),
    discard=(Card(R, 1), Card(R, 1), Card(Y, 2), Card(G, 2), Card(W, 2)),
    tokens=6,
    lives=3,
    history=((), ("Reveal Alice's Rank 2 Cards",)),
    knowledge=h2_know,
    last_reveal=(0, (1,)),
)
records.append(
    record(
        "hanabi-fresh-play-clue",
        "hanabi",
        hanabi.state_to_dict(h2),
        ec={
            "question": "What is the next playable card on the Red stack?",
            "options": ["Red 1.", "Red 2.", "Red 3.", "The Red stack is full."],
            "gold": 1,
        },
        tom={"variant": "infer", "gold": "I should Play Card 1"},
        jp={"gold": "Play my Card 1"},
    )
)

h3 = build_hanabi_state(
    hands=[
        [Card(Y, 1), Card(B, 2), Card(R, 4), Card(G, 5), Card(W, 2)],
        [Card(W, 4), Card(Y, 3), Card(G, 2), Card(R, 1), Card(B, 3)],
    ],
    stacks=(1, 1, 0, 3, 0),
    discard=(Card(G, 1), Card(G, 1), Card(W, 1), Card(W, 1), Card(Y, 1)),
    tokens=4,
    lives=2,
)
records.append(
    record(
        "hanabi-single-target-clue",
        "hanabi",
        hanabi.state_to_dict(h3),
        ec={
            "question": "How many reveal tokens will remain after I give one reveal?",
            "options": ["4.", "3.", "5."],
            "gold": 1,
        },
        tom={"variant": "reveal", "gold": "Reveal Bob's White color cards."},
        jp={"gold": "Reveal Bob's White color cards"},
    )
)

h4_know = [
    [CardKnowledge() for _ in range(5)],
    [CardKnowledge() for _ in range(5)],
]
for i in (1, 2):
    h4_know[0][i].ranks = {5}
    h4_know[0][i].touched = True
for i in (0, 3, 4):
    h4_know[0][i].ranks.discard(5)
h4 = build_hanabi_state(
    hands=[
        [Card(Y, 3), Card(W, 5), Card(B, 5), Card(G, 4), Card(R, 3)],
        [Card(R, 4), Card(Y, 4), Card(G, 2), Card(B, 4), Card(W, 2)],
    ],
    stacks=(2, 2, 1, 0, 3),
    discard=(Card(R, 1), Card(Y, 1), Card(G, 1), Card(W, 1), Card(B, 1)),
    tokens=0,
    lives=2,
    history=((), ("Discard Card 3",)),
)
records.append(
    record(
        "hanabi-no-tokens",
        "hanabi",
        hanabi.state_to_dict(h4),
        ec={
            "question": "How many more reveals can I give right now?",
            "options": ["0.", "1.", "8."],
            "gold": 0,
        },
        tom={"variant": "infer", "gold": "I should Discard Card 0"},
        jp={"gold": "Discard my Card 0"},
    )
)

# --- pursuit ------------------------------------------------------------------

RING_MAP = """rooms: 1 2 3 4 5 6 7 8 9
door: 1 2 closed
door: 2 3 open
door: 3 4 closed
door: 4 5 open
door: 5 6 open
door: 6 1 open
door: 2 7 open
door: 4 8 open
door: 6 9 open
agents: 6 1
adversary: 2
"""

p1_graph = pursuit.parse_map(RING_MAP, name="ring9")
p1 = pursuit.initial_state(p1_graph, "capture")
records.append(
    record(
        "capture-ring-closed-door",
        "capture",
        pursuit.state_to_dict(p1),
        map_text=RING_MAP,
        ec={
            "question": "Can the thief currently move from Room 2 to Room 1?",
            "options": [
                "Yes, the door is open.",
                "No, the door between Room 1 and 2 is closed.",
                "No, the thief cannot move at all.",
            ],
            "gold": 1,
        },
        tom={"variant": "intent", "gold": "Move to Room 6"},
        jp={"gold": "Move to Room 5"},
    )
)

lattice_text = map_text_of("rooms9")
p2_graph = pursuit.parse_map(lattice_text, name="rooms9")
p2 = pursuit.initial_state(p2_graph, "capture")
p2.agent_rooms = [2, 9]
p2.adversary_room = 3
records.append(
    record(
        "capture-lattice-corner",
        "capture",
        pursuit.state_to_dict(p2),
        map_text=lattice_text,
        ec={
            "question": "If the thief tries to leave Room 3, which rooms can it move to?",
            "options": [
                "Room 2 and Room 6.",
                "Only Room 6.",
                "Only Room 2.",
                "It cannot move.",
            ],
            "gold": 0,
        },
        tom={"variant": "intent", "gold": "Move to Room 6"},
        jp={"gold": "Stay in current Room"},
    )
)

lair_text = map_text_of("lair9")
p3_graph = pursuit.parse_map(lair_text, name="lair9")
p3 = pursuit.initial_state(p3_graph, "escape")
p3.agent_rooms = [3, 6]
p3.adversary_room = 5
p3.generator_fixes_done = {3: 2, 7: 3}
records.append(
    record(
        "escape-final-fix",
        "escape",
        pursuit.state_to_dict(p3),
        map_text=lair_text,
        ec={
            "question": "If I fix the generator in my room, will the exit gate open?",
            "options": [
                "Yes, all generators will then be fixed.",
                "No, the generator in room 7 still needs fixes.",
                "No, the gate only opens when the killer is far away.",
            ],
            "gold": 0,
        },
        tom={"variant": "intent", "gold": "Move to Room 9"},
        jp={"gold": "Fix the generator"},
    )
)

p4 = pursuit.initial_state(p3_graph, "escape")
p4.agent_rooms = [6, 1]
p4.adversary_room = 5
p4.generator_fixes_done = {3: 3, 7: 3}
p4.gate_open = True
records.append(
    record(
        "escape-gate-open-run",
        "escape",
        pursuit.state_to_dict(p4),
        map_text=lair_text,
        ec={
            "question": "Which agent will the killer target after this turn?",
            "options": ["Me (Alice).", "Bob.", "Neither of us."],
            "gold": 0,
        },
        tom={"variant": "intent", "gold": "Move to Room 4"},
        jp={"gold": "Move to Room 9"},
    )
)

# --- validate and write ---------------------------------------------------------

items = qa.render_all(records)
by_cat = Counter(item.category for item in items)
print(f"{len(records)} scenarios, {len(items)} questions: {dict(by_cat)}")
for item in items:
    assert item.gold_index < len(item.options)

OUT.write_text(
    "\n".join(rec.to_json() for rec in records) + "\n", encoding="utf-8"
)
print(f"wrote {OUT}")
