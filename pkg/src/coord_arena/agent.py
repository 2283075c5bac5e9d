"""Decision pipeline: memory assembly, planner + auxiliary calls, grounding.

``decide`` is the spine: optional partner-action interpretation feeds the
working memory, the planner proposes a move, the grounding cascade maps the
free text onto the legal list, and an optional verifier can veto and force a
re-prompt. Whatever the backends emit, the returned action is always a member
of the legal list.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from typing import Optional

from . import describe
from .backends import complete as backend_complete
from .core import ActionId, AgentFailure, BackendFailure, ParseFailure

log = logging.getLogger("coord_arena.agent")

PARSE_THRESHOLD = 0.6
PARSE_MARGIN = 0.1
MAX_PARSE_REASKS = 2
LETTERED_GAMES = {"hanabi", "capture", "escape", "mcq"}

FORMAT_REMINDER = (
    "Your previous reply could not be matched to a legal action. "
    "Reply with exactly one action from the list, in the format "
    "Action: <action>."
)


@dataclass
class AgentContext:
    long_term: str  # game description: rules, conventions, format instruction
    working: str  # current observation text (plus any appended ToM notes)
    episodic: list[str] = field(default_factory=list)  # own past action labels


@dataclass
class CacConfig:
    planner: object
    tom: Optional[object] = None
    verifier: Optional[object] = None
    max_verify_retries: int = 3
    fallback_action_rule: str = "safest"  # safest | first-legal
    parse_threshold: float = PARSE_THRESHOLD
    parse_margin: float = PARSE_MARGIN

    def __post_init__(self):
        if self.verifier is not None and self.max_verify_retries < 1:
            raise ValueError("max_verify_retries must be >= 1 with a verifier")
        if self.fallback_action_rule not in ("safest", "first-legal"):
            raise ValueError(f"unknown fallback rule {self.fallback_action_rule!r}")


@dataclass
class TraceStep:
    role: str  # planner | tom | verifier
    messages: list
    response: str
    latency: float = 0.0
    parsed: Optional[str] = None  # action label or verdict or note summary

    def to_dict(self) -> dict:
        return {
            "role": self.role,
            "messages": self.messages,
            "response": self.response,
            "latency": self.latency,
            "parsed": self.parsed,
        }


@dataclass
class DecisionTrace:
    steps: list = field(default_factory=list)
    chosen: Optional[str] = None
    fallback_used: bool = False
    excluded: list = field(default_factory=list)

    def calls(self, role: str) -> list:
        return [s for s in self.steps if s.role == role]

    @property
    def latency(self) -> float:
        return sum(s.latency for s in self.steps)

    def to_dict(self) -> dict:
        return {
            "steps": [s.to_dict() for s in self.steps],
            "chosen": self.chosen,
            "fallback_used": self.fallback_used,
            "excluded": list(self.excluded),
        }


@dataclass
class ToMNotes:
    explanation: str
    suggestion: str
    raw: str

    def render(self) -> str:
        if self.explanation or self.suggestion:
            lines = ["Theory of Mind notes:"]
            if self.explanation:
                lines.append(f"Partner Action Explanation: {self.explanation}")
            if self.suggestion:
                lines.append(f"Clue Suggestion: {self.suggestion}")
            return "\n".join(lines)
        return "Theory of Mind notes:\n" + self.raw


def _normalize(text: str) -> str:
    return " ".join(re.sub(r"[^a-z0-9 ]+", " ", text.lower()).split())


def _tokens(text: str) -> set:
    return set(_normalize(text).split())


def _letter_candidates(segment: str, option_count: int) -> set:
    """Standalone option letters: 'B.', '(C)', 'option D', or the bare letter."""
    letters = set()
    stripped = segment.strip().strip(".()[]:")
    if len(stripped) == 1 and stripped.isalpha():
        letters.add(stripped.upper())
    for match in re.finditer(r"(?<![A-Za-z])([A-Za-z])[.):]", segment):
        letters.add(match.group(1).upper())
    for match in re.finditer(
        r"(?:option|choose|select|answer is|answer)[\s:]+\(?([A-Za-z])(?![A-Za-z])",
        segment,
        re.IGNORECASE,
    ):
        letters.add(match.group(1).upper())
    top = chr(ord("A") + option_count - 1)
    return {l for l in letters if "A" <= l <= top}


def action_segment(response: str) -> str:
    """Text after the last 'Action:' marker, or the whole reply."""
    matches = list(re.finditer(r"action\s*:", response, re.IGNORECASE))
    if matches:
        return response[matches[-1].end():].strip()
    return response.strip()


def parse_action(
    response: str,
    legal: list[ActionId],
    threshold: float = PARSE_THRESHOLD,
    margin: float = PARSE_MARGIN,
    lettered: Optional[bool] = None,
) -> ActionId:
    """Ground a free-text reply onto the legal list.

    Cascade: text after the last ``Action:`` marker; exact label match
    (case/punctuation-insensitive); lettered-option match for games whose
    action lists are lettered; finally best token overlap, requiring both a
    floor and a margin over the runner-up.
    """
    if not legal:
        raise ValueError("legal list is empty")
    if lettered is None:
        lettered = legal[0].game in LETTERED_GAMES
    segment = action_segment(response)

    normalized = _normalize(segment)
    for action in legal:
        if normalized == _normalize(action.label):
            return action

    if lettered:
        letters = _letter_candidates(segment, len(legal))
        if len(letters) == 1:
            index = ord(letters.pop()) - ord("A")
            return legal[index]

    seg_tokens = _tokens(segment)
    scored = []
    for action in legal:
        label_tokens = _tokens(action.label)
        if not label_tokens:
            continue
        scored.append((len(seg_tokens & label_tokens) / len(label_tokens), action))
    scored.sort(key=lambda pair: -pair[0])
    if scored and scored[0][0] >= threshold:
        if len(scored) == 1 or scored[0][0] - scored[1][0] >= margin:
            return scored[0][1]
    raise ParseFailure(f"no legal action matches {segment[:80]!r}")


def verify(backend, action_label: str, observation: str) -> str:
    """Ask the verifier; returns ``Okay`` or ``NotOkay`` (conservative)."""
    messages = [
        {"role": "system", "content": describe.verifier_system_prompt()},
        {
            "role": "user",
            "content": f"Selected action: {action_label}\n\nCurrent state:\n{observation}",
        },
    ]
    response = backend_complete(backend, messages)
    return response, verdict_of(response)


def verdict_of(response: str) -> str:
    lowered = response.lower()
    last_ok = lowered.rfind("verification: okay")
    last_not = lowered.rfind("verification: not okay")
    if last_not == -1 and last_ok == -1:
        return "NotOkay"
    return "Okay" if last_ok > last_not else "NotOkay"


def tom_infer(backend, partner_action: str, observation: str, system_prompt: str):
    """Interpret the partner's last action; malformed output degrades to raw text."""
    messages = [
        {"role": "system", "content": system_prompt},
        {
            "role": "user",
            "content": (
                f"My partner's selected action: {partner_action}\n"
                f"My latest state information after my partner's action:\n{observation}"
            ),
        },
    ]
    response = backend_complete(backend, messages)
    explanation = _field_after(response, "Partner Action Explanation:")
    suggestion = _field_after(response, "Clue Suggestion:")
    return ToMNotes(explanation, suggestion, response), messages


def _field_after(text: str, marker: str) -> str:
    index = text.find(marker)
    if index == -1:
        return ""
    rest = text[index + len(marker):]
    for stop in ("Partner Action Explanation:", "Clue Suggestion:"):
        cut = rest.find(stop)
        if cut != -1:
            rest = rest[:cut]
    return rest.strip().splitlines()[0].strip() if rest.strip() else ""


def fallback_by_labels(legal: list[ActionId]) -> ActionId:
    """Label-driven safest action: never play an uncertain card."""
    labels = {a.label: a for a in legal}
    if "wait." in labels:
        return labels["wait."]
    if "Stay in current Room" in labels:
        return labels["Stay in current Room"]
    discards = [a for a in legal if a.label.startswith("Discard my Card ")]
    if discards:
        return min(discards, key=lambda a: int(a.label.rsplit(" ", 1)[1]))
    reveals = [a for a in legal if a.label.startswith("Reveal ")]
    if reveals:
        return reveals[0]
    return legal[0]


def _latency_of(backend) -> float:
    calls = getattr(backend, "calls", None)
    return calls[-1].latency if calls else 0.0


def decide(
    ctx: AgentContext,
    cfg: CacConfig,
    legal: list[ActionId],
    partner_last: Optional[ActionId],
    game: str = "",
    names: tuple[str, str] = ("Alice", "Bob"),
    player: int = 0,
    fallback: Optional[ActionId] = None,
) -> tuple[ActionId, DecisionTrace]:
    """Run the full reasoning pipeline; always returns a legal action."""
    if not legal:
        raise ValueError("legal list is empty")
    trace = DecisionTrace()
    working = ctx.working

    if cfg.tom is not None and partner_last is not None:
        system_prompt = describe.tom_system_prompt(game or legal[0].game, player, names)
        try:
            notes, messages = tom_infer(cfg.tom, partner_last.label, working, system_prompt)
        except BackendFailure as exc:
            raise AgentFailure(f"ToM backend failed: {exc}") from exc
        trace.steps.append(
            TraceStep(
                role="tom",
                messages=messages,
                response=notes.raw,
                latency=_latency_of(cfg.tom),
                parsed=notes.explanation or None,
            )
        )
        working = working + "\n\n" + notes.render()

    def pick_fallback() -> ActionId:
        trace.fallback_used = True
        if cfg.fallback_action_rule == "first-legal":
            chosen = legal[0]
        else:
            chosen = fallback if fallback is not None else fallback_by_labels(legal)
        trace.chosen = chosen.label
        return chosen

    parse_reasks = 0
    verify_rejections = 0
    extra_instruction = ""
    while True:
        user_text = working
        if trace.excluded:
            user_text += "\n\nDo not choose: " + "; ".join(trace.excluded) + "."
        if extra_instruction:
            user_text += "\n\n" + extra_instruction
        messages = [
            {"role": "system", "content": ctx.long_term},
            {"role": "user", "content": user_text},
        ]
        try:
            response = backend_complete(cfg.planner, messages)
        except BackendFailure as exc:
            raise AgentFailure(f"planner backend failed: {exc}") from exc
        step = TraceStep(
            role="planner",
            messages=messages,
            response=response,
            latency=_latency_of(cfg.planner),
        )
        trace.steps.append(step)
        try:
            action = parse_action(
                response, legal, cfg.parse_threshold, cfg.parse_margin
            )
        except ParseFailure:
            parse_reasks += 1
            if parse_reasks > MAX_PARSE_REASKS:
                return pick_fallback(), trace
            extra_instruction = FORMAT_REMINDER
            continue
        step.parsed = action.label

        if cfg.verifier is None:
            trace.chosen = action.label
            return action, trace
        try:
            response_text, verdict = verify(cfg.verifier, action.label, working)
        except BackendFailure as exc:
            raise AgentFailure(f"verifier backend failed: {exc}") from exc
        trace.steps.append(
            TraceStep(
                role="verifier",
                messages=[{"role": "user", "content": action.label}],
                response=response_text,
                latency=_latency_of(cfg.verifier),
                parsed=verdict,
            )
        )
        if verdict == "Okay":
            trace.chosen = action.label
            return action, trace
        verify_rejections += 1
        if verify_rejections > cfg.max_verify_retries:
            return pick_fallback(), trace
        trace.excluded.append(action.label)
        extra_instruction = ""


class CacAgent:
    """Episode-facing wrapper: owns memory, computes game-aware fallbacks."""

    def __init__(
        self,
        cfg: CacConfig,
        name: str = "cac",
    ):
        self.cfg = cfg
        self.name = name
        self.episodic: list[str] = []
        self.traces: list[DecisionTrace] = []
        self.last_latency: float = 0.0
        self._description: Optional[str] = None

    def reset(self) -> None:
        self.episodic = []
        self.traces = []
        self._description = None

    def _safest(self, env, state, player: int, legal: list[ActionId]) -> ActionId:
        if env.game == "hanabi":
            discards = [a for a in legal if a.label.startswith("Discard my Card ")]
            if discards:
                knowledge = state.knowledge[player]
                untouched = [
                    a
                    for a in discards
                    if not knowledge[int(a.label.rsplit(" ", 1)[1])].touched
                ]
                pool = untouched or discards
                return min(pool, key=lambda a: int(a.label.rsplit(" ", 1)[1]))
        return fallback_by_labels(legal)

    def decide(self, env, state, player, legal, observation, partner_last):
        if self._description is None:
            self._description = env.description(player)
        working = observation
        if env.game != "hanabi":
            history = "My Action History: [" + ", ".join(self.episodic) + "]"
            working = history + "\n\n" + observation
        ctx = AgentContext(
            long_term=self._description, working=working, episodic=self.episodic
        )
        action, trace = decide(
            ctx,
            self.cfg,
            legal,
            partner_last,
            game=env.game,
            names=getattr(env, "names", ("Alice", "Bob")),
            player=player,
            fallback=self._safest(env, state, player, legal),
        )
        self.episodic.append(action.label)
        self.traces.append(trace)
        self.last_latency = trace.latency
        log.debug(
            "decision agent=%s seat=%d trace=%s",
            self.name,
            player,
            json.dumps(trace.to_dict(), ensure_ascii=False),
        )
        return action
