"""Multiple-choice evaluation: scenario snapshots, question rendering,
answer extraction, per-category scoring, and correlation statistics.

A scenario is one frozen engine state plus gold answers for the three
question categories: environment comprehension (EC), partner-modeling (ToM),
and next-action choice (JP). Scenarios live in line-delimited JSON; results
export as CSV rows of (model, category, trial, accuracy).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from . import describe, hanabi, kitchen, pursuit
from .agent import _letter_candidates, _normalize, _tokens
from .core import CoordArenaError

CATEGORIES = ("EC", "ToM", "JP")
UNMATCHED = "Unmatched"

TOM_QUESTIONS = {
    "intent": "What action does my partner intend to take?",
    "reveal": (
        "What information about his cards should I reveal to my partner "
        "so that he knows to play a card on his turn?"
    ),
    "infer": "What can I infer from my partner's previous action?",
}
JP_QUESTION = "What action should I take next?"


class MissingGold(CoordArenaError):
    pass


class LengthMismatch(CoordArenaError):
    pass


class DegenerateInput(CoordArenaError):
    pass


@dataclass
class ScenarioRecord:
    id: str
    game: str
    acting_player: int
    state_doc: dict
    map_text: Optional[str] = None  # pursuit graphs travel with the record
    ec: Optional[dict] = None  # {question, options, gold}
    tom: Optional[dict] = None  # {variant, gold, options?}
    jp: Optional[dict] = None  # {gold}

    def load_state(self):
        if self.game == "hanabi":
            return hanabi.state_from_dict(self.state_doc)
        if self.game == "kitchen":
            return kitchen.state_from_dict(self.state_doc)
        graph = pursuit.parse_map(self.map_text, name=self.state_doc["map_name"])
        return pursuit.state_from_dict(self.state_doc, graph)

    @classmethod
    def from_json(cls, line: str) -> "ScenarioRecord":
        doc = json.loads(line)
        return cls(
            id=doc["id"],
            game=doc["game"],
            acting_player=doc["acting_player"],
            state_doc=doc["state"],
            map_text=doc.get("map_text"),
            ec=doc.get("ec"),
            tom=doc.get("tom"),
            jp=doc.get("jp"),
        )

    def to_json(self) -> str:
        doc = {
            "id": self.id,
            "game": self.game,
            "acting_player": self.acting_player,
            "state": self.state_doc,
        }
        if self.map_text is not None:
            doc["map_text"] = self.map_text
        for key, value in (("ec", self.ec), ("tom", self.tom), ("jp", self.jp)):
            if value is not None:
                doc[key] = value
        return json.dumps(doc, ensure_ascii=False)


@dataclass
class MCQItem:
    scenario_id: str
    category: str
    prompt: str
    options: list[str]
    gold: str  # option letter

    @property
    def gold_index(self) -> int:
        return ord(self.gold) - ord("A")


def load_pack(path: Optional[Path] = None) -> list[ScenarioRecord]:
    """Bundled scenario pack, or any pack file in the same line format."""
    if path is None:
        text = (
            resources.files("coord_arena")
            .joinpath("data/scenarios.jsonl")
            .read_text(encoding="utf-8")
        )
    else:
        text = Path(path).read_text(encoding="utf-8")
    return [ScenarioRecord.from_json(line) for line in text.splitlines() if line.strip()]


def _observation(rec: ScenarioRecord, state, include_actions: bool) -> str:
    if rec.game == "hanabi":
        return describe.describe_hanabi(state, rec.acting_player, include_actions)
    if rec.game == "kitchen":
        return describe.describe_kitchen(
            state, rec.acting_player, include_actions=include_actions
        )
    return describe.describe_pursuit(
        state, rec.game, rec.acting_player, include_actions
    )


def _legal_labels(rec: ScenarioRecord, state, player: int) -> list[str]:
    if rec.game == "hanabi":
        return [a.label for a in hanabi.legal_actions(state)]
    if rec.game == "kitchen":
        return kitchen.feasible_macros(state, player)
    return pursuit.legal_action_labels(state, player)


def _tom_options(rec: ScenarioRecord, state) -> list[str]:
    variant = rec.tom.get("variant", "intent")
    if "options" in rec.tom:
        return list(rec.tom["options"])
    if variant == "intent":
        return _legal_labels(rec, state, 1 - rec.acting_player)
    if variant == "reveal":
        return [
            label + "."
            for label in _legal_labels(rec, state, rec.acting_player)
            if label.startswith("Reveal ")
        ]
    if variant == "infer":
        hand = len(state.hands[rec.acting_player])
        return [f"I should Play Card {i}" for i in range(hand)] + [
            f"I should Discard Card {i}" for i in range(hand)
        ]
    raise ValueError(f"unknown ToM variant {variant!r}")


def _lettered(options: list[str]) -> str:
    return "\n".join(
        f"{chr(ord('A') + i)}. {option}" for i, option in enumerate(options)
    )


def render_mcq(rec: ScenarioRecord, category: str) -> MCQItem:
    """Build the multiple-choice item for one scenario and category."""
    if category not in CATEGORIES:
        raise ValueError(f"unknown category {category!r}")
    state = rec.load_state()
    if category == "EC":
        if not rec.ec or "gold" not in rec.ec:
            raise MissingGold(f"{rec.id} has no EC gold")
        options = list(rec.ec["options"])
        gold_index = rec.ec["gold"]
        prompt = (
            _observation(rec, state, include_actions=False)
            + f"\n\n{rec.ec['question']}\nAvailable Answers:\n"
            + _lettered(options)
        )
    elif category == "ToM":
        if not rec.tom or "gold" not in rec.tom:
            raise MissingGold(f"{rec.id} has no ToM gold")
        options = _tom_options(rec, state)
        gold = rec.tom["gold"]
        if gold not in options:
            raise MissingGold(f"{rec.id}: ToM gold {gold!r} not among options")
        gold_index = options.index(gold)
        variant = rec.tom.get("variant", "intent")
        header = "Available Answers:" if rec.game == "hanabi" else "Available Actions:"
        prompt = (
            _observation(rec, state, include_actions=False)
            + f"\n\n{TOM_QUESTIONS[variant]}\n{header}\n"
            + _lettered(options)
        )
    else:
        if not rec.jp or "gold" not in rec.jp:
            raise MissingGold(f"{rec.id} has no JP gold")
        options = _legal_labels(rec, state, rec.acting_player)
        gold = rec.jp["gold"]
        if gold not in options:
            raise MissingGold(f"{rec.id}: JP gold {gold!r} is not legal")
        gold_index = options.index(gold)
        prompt = (
            _observation(rec, state, include_actions=False)
            + f"\n\n{JP_QUESTION}\nAvailable Actions:\n"
            + _lettered(options)
        )
    if not 0 <= gold_index < len(options):
        raise MissingGold(f"{rec.id}: gold index {gold_index} out of range")
    return MCQItem(
        scenario_id=rec.id,
        category=category,
        prompt=prompt,
        options=options,
        gold=chr(ord("A") + gold_index),
    )


def render_all(records: list[ScenarioRecord]) -> list[MCQItem]:
    items = []
    for rec in records:
        for category, payload in (("EC", rec.ec), ("ToM", rec.tom), ("JP", rec.jp)):
            if payload is not None:
                items.append(render_mcq(rec, category))
    return items


def extract_answer(response: str, item: MCQItem) -> str:
    """Option letter for a free-text reply, or ``Unmatched``.

    Cascade: explicit letter pattern, then fuzzy option-text matching with
    the same floor and margin the action parser uses.
    """
    letters = _letter_candidates(response, len(item.options))
    if len(letters) == 1:
        return letters.pop()
    normalized = _normalize(response)
    for i, option in enumerate(item.options):
        if normalized == _normalize(option):
            return chr(ord("A") + i)
    response_tokens = _tokens(response)
    scored = []
    for i, option in enumerate(item.options):
        option_tokens = _tokens(option)
        if not option_tokens:
            continue
        scored.append(
            (len(response_tokens & option_tokens) / len(option_tokens), i)
        )
    scored.sort(key=lambda pair: (-pair[0], pair[1]))
    if scored and scored[0][0] >= 0.6:
        if len(scored) == 1 or scored[0][0] - scored[1][0] >= 0.1:
            return chr(ord("A") + scored[0][1])
    return UNMATCHED


@dataclass
class ScoreReport:
    trials: int
    per_trial: dict  # category -> list of accuracies, one per trial
    mean: dict  # category -> mean accuracy
    unmatched: dict  # category -> total unmatched responses
    random_baseline: dict  # category -> expected accuracy of uniform guessing
    counts: dict  # category -> item count


def score_run(
    items: list[MCQItem], responses: list[list[str]], trials: int
) -> ScoreReport:
    """Accuracy per category per trial; unmatched replies count as wrong."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if len(responses) != len(items):
        raise LengthMismatch(f"{len(responses)} response rows for {len(items)} items")
    for row in responses:
        if len(row) != trials:
            raise LengthMismatch(f"expected {trials} trials per item, got {len(row)}")
    per_trial = {c: [0.0] * trials for c in CATEGORIES}
    counts = {c: 0 for c in CATEGORIES}
    unmatched = {c: 0 for c in CATEGORIES}
    baseline_sum = {c: 0.0 for c in CATEGORIES}
    correct = {c: [0] * trials for c in CATEGORIES}
    for item, row in zip(items, responses):
        cat = item.category
        counts[cat] += 1
        baseline_sum[cat] += 1.0 / len(item.options)
        for t, response in enumerate(row):
            letter = extract_answer(response, item)
            if letter == UNMATCHED:
                unmatched[cat] += 1
            elif letter == item.gold:
                correct[cat][t] += 1
    mean = {}
    baseline = {}
    for cat in CATEGORIES:
        if counts[cat]:
            per_trial[cat] = [correct[cat][t] / counts[cat] for t in range(trials)]
            mean[cat] = sum(per_trial[cat]) / trials
            baseline[cat] = baseline_sum[cat] / counts[cat]
        else:
            per_trial[cat] = []
            mean[cat] = float("nan")
            baseline[cat] = float("nan")
    return ScoreReport(
        trials=trials,
        per_trial=per_trial,
        mean=mean,
        unmatched=unmatched,
        random_baseline=baseline,
        counts=counts,
    )


def correlations(x, y) -> tuple[float, float]:
    """Pearson r and Spearman rho (average ranks for ties)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatch("inputs must be equal-length vectors")
    if len(x) < 3:
        raise ValueError("need at least 3 points")
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise DegenerateInput("zero variance input")
    r = _pearson(x, y)
    rho = _pearson(_average_ranks(x), _average_ranks(y))
    return (float(r), float(rho))


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    dx = x - x.mean()
    dy = y - y.mean()
    return float((dx @ dy) / np.sqrt((dx @ dx) * (dy @ dy)))


def _average_ranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=float)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2 + 1  # average of 1-based ranks
        i = j + 1
    return ranks


def write_results_csv(path, model: str, report: ScoreReport) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model", "category", "trial", "accuracy"])
        for category in CATEGORIES:
            for trial, accuracy in enumerate(report.per_trial[category]):
                writer.writerow([model, category, trial, f"{accuracy:.6f}"])
