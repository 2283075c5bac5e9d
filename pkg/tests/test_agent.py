"""Decision pipeline: grounding cascade, verifier loop, ToM wiring, fallbacks."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coord_arena import hanabi
from coord_arena.agent import (
    AgentContext,
    CacAgent,
    CacConfig,
    decide,
    fallback_by_labels,
    parse_action,
    tom_infer,
    verdict_of,
    verify,
)
from coord_arena.backends import ReplayBackend
from coord_arena.core import ActionId, ParseFailure
from coord_arena.describe import tom_system_prompt
from coord_arena.envs import HanabiEnv, KitchenEnv
from coord_arena.core import run_episode
from coord_arena.policies import ScriptedAgent


def acts(game, *labels):
    return [ActionId(game, i, label) for i, label in enumerate(labels)]

KITCHEN = acts(
    "kitchen",
    "place onion in c0.",
    "place onion in c1.",
    "place onion on s0.",
    "wait.",
    "move away.",
)

HANABI = acts(
    "hanabi",
    "Reveal Bob's Yellow color cards",
    "Reveal Bob's Green color cards",
    "Reveal Bob's rank 1 cards",
    "Play my Card 0",
    "Play my Card 1",
    "Discard my Card 0",
    "Discard my Card 1",
)


def ctx(obs="state text"):
    return AgentContext(long_term="rules", working=obs)


# --- parse_action cascade -----------------------------------------------------


def test_parse_exact_after_action_marker():
    action = parse_action("Explanation: x\nAction: place onion in c0", KITCHEN)
    assert action.label == "place onion in c0."


def test_parse_is_case_and_punctuation_insensitive():
    action = parse_action("ACTION:  Place Onion In C0!", KITCHEN)
    assert action.label == "place onion in c0."


def test_parse_last_action_marker_wins():
    text = "Action: wait.\nOn second thought.\nAction: move away."
    assert parse_action(text, KITCHEN).label == "move away."


def test_parse_lettered_option():
    action = parse_action("I choose B. Reveal Bob's Green color cards", HANABI)
    assert action.label == "Reveal Bob's Green color cards"


def test_parse_bare_letter():
    assert parse_action("Action: C", HANABI).label == "Reveal Bob's rank 1 cards"
    assert parse_action("(D)", HANABI).label == "Play my Card 0"


def test_parse_letters_not_used_for_kitchen_lists():
    with pytest.raises(ParseFailure):
        parse_action("B.", KITCHEN)


def test_parse_token_overlap_with_margin():
    # unambiguous near-miss phrasing
    action = parse_action("Action: please reveal the rank 1 cards to Bob", HANABI)
    assert action.label == "Reveal Bob's rank 1 cards"
    # ambiguous between c0 and c1: below margin
    with pytest.raises(ParseFailure):
        parse_action("Action: place the onion in a cooker", KITCHEN)


def test_parse_garbage_fails():
    with pytest.raises(ParseFailure):
        parse_action("Action: fly to the moon", KITCHEN)


# --- verify -------------------------------------------------------------------


def test_verdict_parsing_rules():
    assert verdict_of("Looks fine. Verification: Okay") == "Okay"
    assert verdict_of("risky! Verification: Not Okay") == "NotOkay"
    assert verdict_of("no marker here") == "NotOkay"
    assert (
        verdict_of("Verification: Okay ... wait no. Verification: Not Okay")
        == "NotOkay"
    )
    assert verdict_of("VERIFICATION: OKAY") == "Okay"


def test_verify_sends_system_prompt():
    backend = ReplayBackend(["Verification: Okay"])
    response, verdict = verify(backend, "Play my Card 0", "obs")
    assert verdict == "Okay"


# --- tom_infer ------------------------------------------------------------------


def test_tom_parses_both_fields():
    backend = ReplayBackend(
        [
            "Partner Action Explanation: bob clued rank 1 meaning play it\n"
            "Clue Suggestion: reveal rank 2"
        ]
    )
    notes, _ = tom_infer(backend, "Reveal Alice's rank 1 cards", "obs",
                         tom_system_prompt("hanabi", 0, ("Alice", "Bob")))
    assert "bob clued rank 1" in notes.explanation
    assert notes.suggestion == "reveal rank 2"


def test_tom_degrades_to_raw_text():
    backend = ReplayBackend(["unstructured rambling"])
    notes, _ = tom_infer(backend, "x", "obs", "sys")
    assert notes.explanation == "" and notes.suggestion == ""
    assert "unstructured rambling" in notes.render()


def test_tom_partial_fields():
    backend = ReplayBackend(["Partner Action Explanation: he wants help"])
    notes, _ = tom_infer(backend, "x", "obs", "sys")
    assert notes.explanation == "he wants help"
    assert notes.suggestion == ""


# --- decide pipeline ------------------------------------------------------------


def test_decide_plain_planner():
    cfg = CacConfig(planner=ReplayBackend(["Action: wait."]))
    action, trace = decide(ctx(), cfg, KITCHEN, None)
    assert action.label == "wait."
    assert [s.role for s in trace.steps] == ["planner"]
    assert not trace.fallback_used


def test_decide_verifier_reject_loop():
    planner = ReplayBackend(
        ["Action: Play my Card 0", "Action: Play my Card 1", "Action: Discard my Card 0"]
    )
    verifier = ReplayBackend(
        ["Verification: Not Okay", "Verification: Not Okay", "Verification: Okay"]
    )
    cfg = CacConfig(planner=planner, verifier=verifier)
    action, trace = decide(ctx(), cfg, HANABI, None)
    assert action.label == "Discard my Card 0"
    assert len(trace.calls("planner")) == 3
    assert len(trace.calls("verifier")) == 3
    assert trace.excluded == ["Play my Card 0", "Play my Card 1"]
    # the re-prompt carries the exclusion instruction
    assert "Do not choose" in trace.calls("planner")[1].messages[1]["content"]


def test_decide_verifier_exhaustion_falls_back():
    planner = ReplayBackend(["Action: Play my Card 0"] * 4)
    verifier = ReplayBackend(["Verification: Not Okay"] * 4)
    cfg = CacConfig(planner=planner, verifier=verifier, max_verify_retries=3)
    action, trace = decide(ctx(), cfg, HANABI, None)
    assert trace.fallback_used
    assert action.label == "Discard my Card 0"  # oldest discard, never a play


def test_decide_parse_failure_reasks_then_fallback():
    planner = ReplayBackend(["gibberish", "more gibberish", "still nothing"])
    cfg = CacConfig(planner=planner)
    action, trace = decide(ctx(), cfg, KITCHEN, None)
    assert trace.fallback_used
    assert action.label == "wait."
    assert len(trace.calls("planner")) == 3
    assert "could not be matched" in trace.calls("planner")[1].messages[1]["content"]


def test_decide_parse_failure_recovers_on_reask():
    planner = ReplayBackend(["???", "Action: move away."])
    cfg = CacConfig(planner=planner)
    action, trace = decide(ctx(), cfg, KITCHEN, None)
    assert action.label == "move away."
    assert not trace.fallback_used


def test_decide_first_legal_fallback_rule():
    planner = ReplayBackend(["x", "x", "x"])
    cfg = CacConfig(planner=planner, fallback_action_rule="first-legal")
    action, trace = decide(ctx(), cfg, KITCHEN, None)
    assert action.label == KITCHEN[0].label


def test_tom_called_iff_configured_and_partner_acted():
    tom = ReplayBackend(["Partner Action Explanation: x\nClue Suggestion: y"])
    planner = ReplayBackend(["Action: wait."] * 2)
    cfg = CacConfig(planner=planner, tom=tom)
    _, trace = decide(ctx(), cfg, KITCHEN, None, game="kitchen")
    assert trace.calls("tom") == []
    partner_last = ActionId("kitchen", 0, "pick up onion from o0.")
    _, trace = decide(ctx(), cfg, KITCHEN, partner_last, game="kitchen")
    assert len(trace.calls("tom")) == 1
    # notes flow into the planner prompt
    assert "Theory of Mind notes:" in trace.calls("planner")[0].messages[1]["content"]


def test_config_validation():
    with pytest.raises(ValueError):
        CacConfig(planner=ReplayBackend([]), verifier=ReplayBackend([]), max_verify_retries=0)
    with pytest.raises(ValueError):
        CacConfig(planner=ReplayBackend([]), fallback_action_rule="bravest")


def test_fallback_by_labels_prefers_safe_moves():
    assert fallback_by_labels(KITCHEN).label == "wait."
    assert fallback_by_labels(HANABI).label == "Discard my Card 0"
    pursuit = acts("capture", "Move to Room 2", "Stay in current Room")
    assert fallback_by_labels(pursuit).label == "Stay in current Room"
    plays_only = acts("hanabi", "Play my Card 0", "Play my Card 1")
    assert fallback_by_labels(plays_only).label == "Play my Card 0"


# --- grounding guarantee (fuzz) --------------------------------------------------


@settings(max_examples=200, deadline=None)
@given(st.text(max_size=400))
def test_decide_always_returns_legal_action(garbage):
    planner = ReplayBackend([garbage, garbage, garbage])
    cfg = CacConfig(planner=planner)
    action, _ = decide(ctx(), cfg, KITCHEN, None)
    assert action.label in {a.label for a in KITCHEN}


@settings(max_examples=150, deadline=None)
@given(
    index=st.integers(min_value=0, max_value=len(HANABI) - 1),
    prefix=st.sampled_from(["", "Action: ", "action :  ", "I think...\nAction: "]),
    shout=st.booleans(),
    drop_punct=st.booleans(),
)
def test_parse_survives_label_perturbations(index, prefix, shout, drop_punct):
    label = HANABI[index].label
    text = label.upper() if shout else label
    if drop_punct:
        text = text.replace("'", "")
    action = parse_action(prefix + text, HANABI)
    assert action.index == index


def test_cac_agent_full_hanabi_episode_with_replay_planner():
    # planner always answers with the fallback-safe "Discard my Card 0" or a
    # clue; partner is the rule bot. The episode must run with no illegal action.
    script = ["Action: Reveal Bob's rank 1 cards"] + ["gibberish"] * 400
    agent = CacAgent(CacConfig(planner=ReplayBackend(script)))
    env = HanabiEnv()
    result = run_episode(
        env, [agent, ScriptedAgent("rule-hanabi")], max_turns=60, seed=5
    )
    assert result.turns > 0
    assert not result.aborted
    assert agent.traces  # DecisionTraces recorded
    assert agent.last_latency == 0.0  # replay backends report zero latency


def test_cac_agent_includes_history_for_kitchen():
    planner = ReplayBackend(["Action: wait."] * 3)
    agent = CacAgent(CacConfig(planner=planner))
    env = KitchenEnv(layout="cramped_room", horizon=3)
    run_episode(env, [agent, ScriptedAgent("greedy-kitchen")], max_turns=3, seed=0)
    first = agent.traces[0].calls("planner")[0].messages[1]["content"]
    assert first.startswith("My Action History: []")
    later = agent.traces[-1].calls("planner")[0].messages[1]["content"]
    assert "My Action History: [wait." in later
