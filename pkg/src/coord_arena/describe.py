"""Render game states and rule preambles as the prompt text agents consume.

Formats are frozen by golden tests; every "Available Actions" entry fuzzy-
parses back to its own action. The long preamble texts live as template
files so wording fixes never touch code.
"""

from __future__ import annotations

from importlib import resources
from typing import Optional

from . import hanabi, kitchen, pursuit


def _template(name: str) -> str:
    return (
        resources.files("coord_arena")
        .joinpath(f"templates/{name}.txt")
        .read_text(encoding="utf-8")
        .rstrip("\n")
    )


def hanabi_rules_text() -> str:
    text = _template("hanabi_description")
    return text.split("I am {me}", 1)[0].rstrip("\n")


def game_description(
    game: str,
    player: int = 0,
    names: tuple[str, str] = ("Alice", "Bob"),
    layout: Optional[kitchen.KitchenLayout] = None,
) -> str:
    """Rules + conventions + response-format preamble for one seat."""
    me, partner = names[player], names[1 - player]
    if game == "hanabi":
        return _template("hanabi_description").format(me=me, partner=partner)
    if game == "kitchen":
        env_description = (
            kitchen_env_description(layout, player, names) if layout else ""
        )
        return _template("kitchen_description").format(
            me=me,
            partner=partner,
            env_description=env_description,
            rules=_template("kitchen_rules"),
            conventions=_template("kitchen_conventions"),
        )
    if game in ("capture", "escape"):
        return _template(f"{game}_description").format(
            me=me, partner=partner, rules=_template(f"{game}_rules")
        )
    raise ValueError(f"unknown game {game!r}")


def rules_text(game: str) -> str:
    if game == "hanabi":
        return hanabi_rules_text()
    if game == "kitchen":
        return "Overcooked has the following rules: " + _template("kitchen_rules") + "."
    return _template(f"{game}_rules")


def game_title(game: str) -> str:
    return {
        "hanabi": "the card game Hanabi",
        "kitchen": "the game Overcooked",
        "capture": "Collab Capture",
        "escape": "Collab Escape",
    }[game]


def tom_system_prompt(game: str, player: int, names: tuple[str, str]) -> str:
    return _template("tom_system").format(
        rules=rules_text(game),
        me=names[player],
        partner=names[1 - player],
        game=game_title(game),
    )


def verifier_system_prompt() -> str:
    return _template("verifier_system")


def kitchen_env_description(
    layout: kitchen.KitchenLayout, player: int, names: tuple[str, str]
) -> str:
    """Station counts plus partition info, derived from the grid."""
    counts = {
        "onion dispenser": len(layout.by_kind["o"]),
        "plate dispenser": len(layout.by_kind["p"]),
        "cooker": len(layout.by_kind["c"]),
        "delivery zone": len(layout.by_kind["d"]),
        "shared counter": len(layout.by_kind["s"]),
        "kitchen counter": len(layout.by_kind["k"]),
    }
    parts = [
        f"{n} {word}{'s' if n != 1 else ''}"
        for word, n in counts.items()
        if n > 0
    ]
    text = (
        f"The kitchen is a {layout.width}x{layout.height} grid with "
        + ", ".join(parts[:-1])
        + f" and {parts[-1]}."
    )
    split_stations = [
        label
        for label in layout.stations
        if layout.accessible_by(label) in ((True, False), (False, True))
    ]
    if split_stations:
        mine = [
            label
            for label in layout.stations
            if label[0] != "k" and layout.accessible_by(label)[player]
        ]
        theirs = [
            label
            for label in layout.stations
            if label[0] != "k" and layout.accessible_by(label)[1 - player]
        ]
        text += (
            " The kitchen is split into two sections."
            f" I can reach: {', '.join(mine)}."
            f" {names[1 - player]} can reach: {', '.join(theirs)}."
            " Items can be passed over the shared counters."
        )
    return text


# --- Hanabi -----------------------------------------------------------------


def _card_list(cards) -> str:
    return "[" + ", ".join(c.label for c in cards) + "]"


def _knowledge_sets(know: hanabi.CardKnowledge) -> str:
    colors = [hanabi.COLORS[c] for c in sorted(know.colors)]
    ranks = [str(r) for r in sorted(know.ranks)]
    return f"[{', '.join(colors)}] [{', '.join(ranks)}]"


def hanabi_action_block(state: hanabi.HanabiState) -> str:
    lines = ["Available Actions:"]
    for action in hanabi.legal_actions(state):
        lines.append(f"{chr(ord('A') + action.index)}. {action.label}")
    return "\n".join(lines)


def describe_hanabi(
    state: hanabi.HanabiState, player: int, include_actions: bool = True
) -> str:
    me = state.names[player]
    partner = state.names[1 - player]
    other = 1 - player
    lines = []
    if state.current_player == player:
        lines.append(f"It is currently My ({me}) turn.")
    else:
        lines.append(f"It is currently {partner}'s turn.")
    lines.append("Current Stacks:")
    lines.append(
        ", ".join(
            f"{color} - {color} {top}"
            for color, top in zip(hanabi.COLORS, state.stacks)
        )
    )
    lines.append("My cards based on my knowledge:")
    for i, know in enumerate(state.knowledge[player]):
        lines.append(f"Card {i} could be: {_knowledge_sets(know)}")
    lines.append(f"I can see {partner}'s Cards are:")
    for i, card in enumerate(state.hands[other]):
        lines.append(f"[Card {i}: {card.label}]")
    lines.append(f"{partner}'s Knowledge about his cards:")
    for i, know in enumerate(state.knowledge[other]):
        lines.append(f"{partner} believes his Card {i} could be: {_knowledge_sets(know)}")
    lines.append(f"Remaining Reveal Tokens: {state.reveal_tokens}")
    lines.append(f"Remaining Lives: {state.lives}")
    lines.append(f"Deck Size: {len(state.deck)}")
    lines.append(f"The discard pile is: {_card_list(state.discard_pile)}")
    lines.append(
        "My Action History: [" + ", ".join(state.history[player]) + "]"
    )
    lines.append("The next playable cards for each stack are:")
    for color, nxt in zip(hanabi.COLORS, hanabi.next_playable(state)):
        if nxt is None:
            lines.append(f"{color} Stack is Full.")
        else:
            lines.append(f"Only {color} {nxt} can be played on {color} Stack")
    text = "\n".join(lines)
    if include_actions and state.current_player == player and not hanabi.is_terminal(state):
        text += "\n\n" + hanabi_action_block(state)
    return text


# --- Kitchen ----------------------------------------------------------------


def _distance_sentence(dist: kitchen.StationDistance) -> str:
    if dist.inaccessible:
        return f"{dist.label} is inaccessible."
    if dist.blocked_by:
        return f"{dist.label} is {dist.distance} units away blocked by {dist.blocked_by}."
    return f"{dist.label} is {dist.distance} units away."


def _location_section(state: kitchen.KitchenState, player: int, with_closest_counter: bool) -> str:
    layout = state.layout
    sentences = []
    for kind in ("o", "p", "c", "d", "s"):
        for label in layout.by_kind[kind]:
            sentences.append(
                _distance_sentence(kitchen.station_distance(state, player, label))
            )
    if with_closest_counter:
        closest = kitchen.closest_empty_plain_counter(state, player)
        if closest is not None:
            d = kitchen.station_distance(state, player, closest)
            sentences.append(
                f"Closest empty kitchen counter {closest} is {d.distance} units away."
            )
    return " ".join(sentences)


def kitchen_action_line(state: kitchen.KitchenState, player: int) -> str:
    return "Available Actions: [" + ", ".join(kitchen.feasible_macros(state, player)) + "]"


def describe_kitchen(
    state: kitchen.KitchenState,
    player: int,
    include_partner_info: bool = True,
    include_actions: bool = True,
) -> str:
    me = state.names[player]
    partner = state.names[1 - player]
    inv_word = lambda item: {None: "nothing", "soup": "cooked soup"}.get(item, item)
    inventory = f"<Inventory>: I am holding {inv_word(state.inventories[player])}."
    if include_partner_info:
        inventory += f" {partner} is holding {inv_word(state.inventories[1 - player])}."
    sections = [inventory]
    sections.append(
        "<My Location Information>: "
        + _location_section(state, player, with_closest_counter=True)
    )
    if include_partner_info:
        sections.append(
            f"<{partner}'s Location Information>: "
            + _location_section(state, 1 - player, with_closest_counter=False)
        )
    env = []
    for i, label in enumerate(state.layout.by_kind["c"]):
        cooker = state.cookers[i]
        env.append(f"{label} contains {cooker.onions} out of 3 onions.")
        env.append(f"{label} is {'on' if cooker.status == 'cooking' else 'off'}.")
        soup_word = {
            "off": "not cooking",
            "cooking": "still cooking",
            "cooked": "cooked",
        }[cooker.status]
        env.append(f"soup in {label} is {soup_word}.")
    for label in state.layout.by_kind["s"]:
        item = state.counters.get(label)
        env.append(f"{label} contains {item}." if item else f"{label} is empty.")
    for label in state.layout.by_kind["k"]:
        item = state.counters.get(label)
        if item:
            env.append(f"{label} contains {item}.")
    sections.append("<Environment Details>: " + " ".join(env))
    if include_actions:
        sections.append(kitchen_action_line(state, player))
    return "\n\n".join(sections)


# --- Pursuit ----------------------------------------------------------------


def pursuit_action_block(state: pursuit.PursuitState, player: int) -> str:
    lines = ["Available Actions:"]
    for i, label in enumerate(pursuit.legal_action_labels(state, player)):
        lines.append(f"{chr(ord('A') + i)}. {label}")
    return "\n".join(lines)


def _door_sentences(state: pursuit.PursuitState) -> str:
    closed = [key for key in state.graph.doors if not state.door_open[key]]
    return " ".join(
        f"Door between Room {a} and {b} is closed." for a, b in closed
    )


def _button_sentences(state: pursuit.PursuitState) -> str:
    sentences = []
    for room in sorted(state.graph.buttons):
        doors = ", ".join(
            f"the door between Room {a} and Room {b}"
            for a, b in state.graph.buttons[room]
        )
        sentences.append(f"The button in Room {room} toggles {doors}.")
    return " ".join(sentences)


def describe_pursuit(
    state: pursuit.PursuitState,
    game: str,
    player: int,
    include_actions: bool = True,
) -> str:
    me = state.names[player]
    partner = state.names[1 - player]
    my_room = state.agent_rooms[player]
    partner_room = state.agent_rooms[1 - player]
    lines = []
    if game == "capture":
        first = (
            f"I ({me}) am in Room {my_room}. {partner} is in Room {partner_room}. "
            f"Thief is in Room {state.adversary_room}."
        )
        lines.append(first)
        doors = _door_sentences(state)
        if doors:
            lines.append(doors)
    else:
        first = f"My name is {me}. I am in room {my_room}."
        if state.escaped[1 - player]:
            first += f" {partner} has escaped."
        elif state.downed[1 - player]:
            first += f" {partner} is downed in room {partner_room}."
        else:
            first += f" {partner} is in room {partner_room}."
        lines.append(first)
        next_room = pursuit.adversary_policy(state, "hunt")
        lines.append(
            f"The killer is in room {state.adversary_room}. We have information "
            f"that the killer will move to room {next_room} after this turn."
        )
        gen_sentences = []
        for room in sorted(state.graph.generators):
            left = state.graph.generators[room] - state.generator_fixes_done[room]
            if left <= 0:
                gen_sentences.append(f"Generator in room {room} is fixed.")
            else:
                plural = "fix" if left == 1 else "fixes"
                gen_sentences.append(
                    f"Generator in room {room} still needs {left} {plural}."
                )
        lines.append(" ".join(gen_sentences))
        lines.append(
            "The exit gate is open." if state.gate_open else "The exit gate is closed."
        )
        doors = _door_sentences(state)
        if doors:
            lines.append(doors)
    buttons = _button_sentences(state)
    if buttons:
        lines.append(buttons)
    text = "\n".join(lines)
    if include_actions and not pursuit.is_terminal(state):
        labels = pursuit.legal_action_labels(state, player)
        if labels:
            text += "\n\n" + pursuit_action_block(state, player)
    return text
