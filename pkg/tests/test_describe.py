"""Golden-format tests for all three serializers and the rule preambles."""

from pathlib import Path

from coord_arena import describe, hanabi, kitchen, pursuit
from coord_arena.envs import builtin_layout
from coord_arena.hanabi import Card, CardKnowledge

GOLDEN = Path(__file__).parent / "golden"

R, Y, G, W, B = range(5)


def reference_hanabi_state() -> hanabi.HanabiState:
    """The late-game position shown in the serializer's reference block."""

    def know(colors, ranks, touched=True):
        return CardKnowledge(set(colors), set(ranks), touched)

    discard = [
        (R, 4), (R, 3), (R, 1), (R, 1), (Y, 5), (Y, 2), (Y, 4),
        (G, 3), (G, 2), (G, 4), (G, 3), (G, 1), (G, 5),
        (B, 5), (B, 3), (B, 4), (B, 4), (B, 1),
        (W, 4), (W, 3), (W, 2), (W, 5), (W, 3),
    ]
    return hanabi.HanabiState(
        deck=[Card(Y, 1), Card(W, 2), Card(B, 1)],
        hands=[
            [Card(Y, 3), Card(B, 2), Card(R, 2), Card(W, 1), Card(W, 1)],
            [Card(G, 1), Card(G, 2), Card(G, 4), Card(W, 4), Card(Y, 1)],
        ],
        knowledge=[
            [
                know({R, Y, G, B}, {1, 2, 3}),
                know({Y, W, B}, {1, 2, 3}),
                know({R}, {2}),
                know({Y, W, B}, {1}),
                know({Y, W, B}, {1}),
            ],
            [
                know({Y, G, W, B}, {1, 2, 4}),
                know({G, W}, {1, 2, 4}),
                know({Y, G}, {1, 2, 3, 4}),
                know({Y, G, W}, {1, 2, 3, 4}),
                know({Y, G}, {1, 2, 4}),
            ],
        ],
        stacks=[5, 4, 1, 1, 3],
        discard_pile=[Card(*c) for c in discard],
        reveal_tokens=1,
        lives=1,
        current_player=0,
        final_turns_remaining=None,
        history=[
            [
                "Discard Card 4",
                "Play Card 0",
                "Reveal Bob's Rank 3 Cards",
                "Discard Card 0",
                "Play Card 4",
            ],
            [],
        ],
    )


def test_hanabi_golden_block():
    state = reference_hanabi_state()
    hanabi.check_invariants(state)
    text = describe.describe_hanabi(state, 0)
    assert text == (GOLDEN / "hanabi_reference_state.txt").read_text()


def test_hanabi_empty_discard_renders_empty_brackets():
    state = hanabi.deal(3)
    text = describe.describe_hanabi(state, 0)
    assert "The discard pile is: []" in text
    assert "My Action History: []" in text


def test_hanabi_full_stack_line():
    state = hanabi.deal(3)
    state.stacks[0] = 5
    text = describe.describe_hanabi(state, 0)
    assert "Red Stack is Full." in text
    assert "Only Yellow 1 can be played on Yellow Stack" in text


def twin_galley_state() -> kitchen.KitchenState:
    layout = builtin_layout("twin_galley")
    state = kitchen.initial_state(layout)
    state.positions = [(1, 2), (3, 2)]
    state.inventories = ["onion", None]
    state.cookers[0].onions = 1
    state.counters["s1"] = "onion"
    return state


def test_kitchen_golden_block():
    text = describe.describe_kitchen(twin_galley_state(), 0)
    assert text == (GOLDEN / "kitchen_twin_galley.txt").read_text()


def test_kitchen_cooking_sentences():
    state = twin_galley_state()
    state.cookers[0] = kitchen.Cooker(onions=3, status="cooking", timer=12)
    text = describe.describe_kitchen(state, 0)
    assert "c0 contains 3 out of 3 onions. c0 is on. soup in c0 is still cooking." in text
    state.cookers[0] = kitchen.Cooker(onions=3, status="cooked", timer=None)
    text = describe.describe_kitchen(state, 0)
    assert "c0 is off. soup in c0 is cooked." in text


def test_kitchen_partner_info_flag():
    state = twin_galley_state()
    text = describe.describe_kitchen(state, 0, include_partner_info=False)
    assert "<Bob's Location Information>" not in text
    assert "Bob is holding" not in text
    assert "<My Location Information>" in text


CAPTURE_MAP = """
rooms: 1 2 3 4 5 6 7 8 9
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


def capture_state() -> pursuit.PursuitState:
    graph = pursuit.parse_map(CAPTURE_MAP, name="ring")
    return pursuit.initial_state(graph, "capture")


def test_capture_golden_block():
    text = describe.describe_pursuit(capture_state(), "capture", 0)
    assert text == (GOLDEN / "capture_room6.txt").read_text()


def test_capture_all_doors_open_no_door_sentences():
    state = capture_state()
    for key in state.door_open:
        state.door_open[key] = True
    text = describe.describe_pursuit(state, "capture", 0)
    assert "is closed" not in text
    assert text.startswith("I (Alice) am in Room 6.")


def test_escape_state_sentences():
    text_map = CAPTURE_MAP + "generator: 3 fixes 2\ngenerator: 7 fixes 1\ngate: 9\n"
    graph = pursuit.parse_map(text_map, name="lair")
    state = pursuit.initial_state(graph, "escape")
    state.generator_fixes_done[3] = 1
    state.generator_fixes_done[7] = 1
    text = describe.describe_pursuit(state, "escape", 0)
    assert "My name is Alice. I am in room 6. Bob is in room 1." in text
    assert "The killer is in room 2." in text
    assert "Generator in room 3 still needs 1 fix." in text
    assert "Generator in room 7 is fixed." in text
    assert "The exit gate is closed." in text
    state.generator_fixes_done[3] = 2
    state.gate_open = True
    text = describe.describe_pursuit(state, "escape", 0)
    assert "The exit gate is open." in text


def test_gate_open_iff_generators_fixed_after_step():
    text_map = CAPTURE_MAP + "generator: 6 fixes 1\ngate: 9\n"
    graph = pursuit.parse_map(text_map, name="lair")
    state = pursuit.initial_state(graph, "escape")
    nxt = pursuit.step(state, ("Fix the generator", "Stay in current Room"))
    assert nxt.gate_open


def test_game_descriptions():
    hanabi_text = describe.game_description("hanabi", 0, ("Alice", "Bob"))
    assert "three 1's, two 2's, two 3's, two 4's, one 5" in hanabi_text
    assert "I am Alice, playing the card game Hanabi with my partner Bob." in hanabi_text
    kitchen_text = describe.game_description(
        "kitchen", 0, ("Alice", "Bob"), layout=builtin_layout("cramped_room")
    )
    assert "Format your response as: Action: <action>." in kitchen_text
    assert "Overcooked has the following rules:" in kitchen_text
    swapped = describe.game_description("hanabi", 0, ("Carol", "Dave"))
    assert "Alice" not in swapped and "Bob" not in swapped
    for game in ("capture", "escape"):
        text = describe.game_description(game, 1, ("Alice", "Bob"))
        assert "I am Bob." in text


def test_forced_coordination_description_mentions_partition():
    layout = builtin_layout("forced_coordination")
    text = describe.kitchen_env_description(layout, 0, ("Alice", "Bob"))
    assert "split into two sections" in text
    assert "passed over the shared counters" in text


def test_rendered_actions_fuzzy_parse_back_to_themselves():
    from coord_arena.agent import parse_action
    from coord_arena.envs import KitchenEnv

    state = hanabi.deal(4)
    legal = hanabi.legal_actions(state)
    for action in legal:
        assert parse_action(f"Action: {action.label}", legal).index == action.index
    env = KitchenEnv(layout="twin_galley")
    kstate = env.reset(0)
    klegal = env.legal_actions(kstate)
    for action in klegal:
        assert parse_action(f"Action: {action.label}", klegal).index == action.index
    pstate = capture_state()
    from coord_arena.core import ActionId

    plegal = [
        ActionId("capture", i, label)
        for i, label in enumerate(pursuit.legal_action_labels(pstate, 0))
    ]
    for action in plegal:
        assert parse_action(f"Action: {action.label}", plegal).index == action.index


def test_available_action_lines_roundtrip_to_labels():
    # every rendered hanabi action line ends with exactly the action label
    state = hanabi.deal(12)
    block = describe.hanabi_action_block(state).splitlines()[1:]
    labels = [a.label for a in hanabi.legal_actions(state)]
    assert [line.split(". ", 1)[1] for line in block] == labels
    # kitchen bracket list splits back into the feasible macro labels
    kstate = twin_galley_state()
    line = describe.kitchen_action_line(kstate, 0)
    inner = line.removeprefix("Available Actions: [").removesuffix("]")
    assert inner.split(", ") == kitchen.feasible_macros(kstate, 0)
