"""Within-subject tactile study protocol: the 10-condition grid (one
unpowered baseline plus 3 voltages x 3 frequencies), seeded randomized
presentation order, questionnaire responses, JSONL persistence and the
aggregate summaries used for reporting.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Sequence

VOLTAGE_LEVELS = (100.0, 200.0, 300.0)
FREQUENCY_LEVELS = (50.0, 100.0, 200.0)

LIKERT_PROPERTIES = ("roughness", "thickness", "stiffness", "warmth")

#: The 16-entry reference fabric catalog, 1-indexed.
FABRIC_CATALOG = (
    "Marquisette",
    "Cashmere",
    "Satin",
    "Milanese",
    "Faille",
    "Viyella",
    "Metallic Tone Cloth",
    "Georgette",
    "Dungaree",
    "Quilting",
    "Paisley",
    "Velveteen",
    "Chenille",
    "Cambric",
    "Cord Weave",
    "Blister Cloth",
)

#: Rating anchors shown to the experimenter: reference cloths spanning each
#: Likert property (rough/stiff/thick/warm extreme, neutral, opposite).
CRITERIA_CLOTHS = {
    "roughness": ("Jeans", "Voile", "Gauze"),
    "stiffness": ("Towelling", "Gauze", "Voile"),
    "thickness": ("Jeans", "Towelling", "Gauze"),
    "warmth": ("Towelling", "Jeans", "Voile"),
}


class ExperimentError(ValueError):
    """Invalid experiment data."""


class DuplicateResponse(ExperimentError):
    """A condition was answered twice."""


@dataclass(frozen=True)
class Condition:
    """One presentation state: unpowered baseline, or a voltage/frequency pair."""

    voltage: float | None = None
    frequency: float | None = None

    def __post_init__(self) -> None:
        if (self.voltage is None) != (self.frequency is None):
            raise ExperimentError("voltage and frequency must both be set or both absent")
        if self.voltage is not None:
            if self.voltage not in VOLTAGE_LEVELS:
                raise ExperimentError(f"voltage must be one of {VOLTAGE_LEVELS}")
            if self.frequency not in FREQUENCY_LEVELS:
                raise ExperimentError(f"frequency must be one of {FREQUENCY_LEVELS}")

    @property
    def is_baseline(self) -> bool:
        return self.voltage is None

    def label(self) -> str:
        if self.is_baseline:
            return "baseline"
        return f"{self.voltage:g}V_{self.frequency:g}Hz"

    def to_json(self) -> dict:
        return {"voltage": self.voltage, "frequency": self.frequency}

    @classmethod
    def from_json(cls, obj: Mapping) -> "Condition":
        return cls(voltage=obj["voltage"], frequency=obj["frequency"])


def build_condition_grid() -> list[Condition]:
    """All 10 conditions in canonical order: baseline first, then voltage-major."""
    grid = [Condition()]
    for v in VOLTAGE_LEVELS:
        for f in FREQUENCY_LEVELS:
            grid.append(Condition(v, f))
    return grid


@dataclass(frozen=True)
class SessionPlan:
    participant_id: str
    seed: int
    order: tuple[Condition, ...]

    def to_json(self) -> dict:
        return {
            "record": "plan",
            "participant_id": self.participant_id,
            "seed": self.seed,
            "order": [c.to_json() for c in self.order],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "SessionPlan":
        return cls(
            participant_id=obj["participant_id"],
            seed=obj["seed"],
            order=tuple(Condition.from_json(c) for c in obj["order"]),
        )


def plan_session(participant_id: str, seed: int) -> SessionPlan:
    """Deterministic Fisher-Yates shuffle of the full grid."""
    if not participant_id:
        raise ExperimentError("participant_id must be non-empty")
    order = build_condition_grid()
    rng = random.Random(seed)
    # Fisher-Yates, explicit so the order is pinned by (seed, grid) alone.
    for i in range(len(order) - 1, 0, -1):
        j = rng.randint(0, i)
        order[i], order[j] = order[j], order[i]
    return SessionPlan(participant_id=participant_id, seed=seed, order=tuple(order))


@dataclass(frozen=True)
class ResponseRecord:
    condition: Condition
    likert: Mapping[str, int]
    acceptable: bool
    free_text: str
    similar_fabric: int
    timestamp: str

    def __post_init__(self) -> None:
        if set(self.likert) != set(LIKERT_PROPERTIES):
            raise ExperimentError(f"likert must rate exactly {LIKERT_PROPERTIES}")
        for prop, score in self.likert.items():
            if not (isinstance(score, int) and 1 <= score <= 5):
                raise ExperimentError(f"likert {prop}={score!r} outside 1..5")
        if not (1 <= self.similar_fabric <= len(FABRIC_CATALOG)):
            raise ExperimentError(
                f"similar_fabric {self.similar_fabric} outside 1..{len(FABRIC_CATALOG)}"
            )

    def to_json(self) -> dict:
        return {
            "record": "response",
            "condition": self.condition.to_json(),
            "likert": {p: self.likert[p] for p in LIKERT_PROPERTIES},
            "acceptable": self.acceptable,
            "free_text": self.free_text,
            "similar_fabric": self.similar_fabric,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "ResponseRecord":
        return cls(
            condition=Condition.from_json(obj["condition"]),
            likert=dict(obj["likert"]),
            acceptable=obj["acceptable"],
            free_text=obj["free_text"],
            similar_fabric=obj["similar_fabric"],
            timestamp=obj["timestamp"],
        )


@dataclass(frozen=True)
class SessionLog:
    plan: SessionPlan
    responses: tuple[ResponseRecord, ...] = ()
    distinct_sensation_count: int | None = None

    def __post_init__(self) -> None:
        seen = [r.condition for r in self.responses]
        if len(set(seen)) != len(seen):
            raise DuplicateResponse("duplicate condition in responses")
        if self.distinct_sensation_count is not None:
            if len(self.responses) != len(self.plan.order):
                raise ExperimentError("distinct count requires a complete session")
            if not (0 <= self.distinct_sensation_count <= 9):
                raise ExperimentError("distinct_sensation_count outside 0..9")

    @property
    def complete(self) -> bool:
        return len(self.responses) == len(self.plan.order)

    def answered(self, condition: Condition) -> bool:
        return any(r.condition == condition for r in self.responses)


def record_response(log: SessionLog, rec: ResponseRecord) -> SessionLog:
    """Append a response, enforcing one answer per planned condition."""
    if rec.condition not in log.plan.order:
        raise ExperimentError(f"condition {rec.condition.label()} not in plan")
    if log.answered(rec.condition):
        raise DuplicateResponse(f"condition {rec.condition.label()} already answered")
    return replace(log, responses=log.responses + (rec,))


def set_distinct_count(log: SessionLog, count: int) -> SessionLog:
    return replace(log, distinct_sensation_count=count)


# ---------------------------------------------------------------------------
# Persistence: append-only JSONL. Line 1 = plan, then one response per line,
# final line = distinct-count object.

def _dump(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def session_to_jsonl(log: SessionLog) -> str:
    lines = [_dump(log.plan.to_json())]
    lines.extend(_dump(r.to_json()) for r in log.responses)
    if log.distinct_sensation_count is not None:
        lines.append(_dump({"record": "distinct", "count": log.distinct_sensation_count}))
    return "\n".join(lines) + "\n"


def session_from_jsonl(text: str) -> SessionLog:
    lines = [ln for ln in text.split("\n") if ln.strip()]
    if not lines:
        raise ExperimentError("empty session file")
    plan_obj = json.loads(lines[0])
    if plan_obj.get("record") != "plan":
        raise ExperimentError("first line of a session file must be the plan")
    log = SessionLog(plan=SessionPlan.from_json(plan_obj))
    for ln in lines[1:]:
        obj = json.loads(ln)
        kind = obj.get("record")
        if kind == "response":
            log = record_response(log, ResponseRecord.from_json(obj))
        elif kind == "distinct":
            log = set_distinct_count(log, obj["count"])
        else:
            raise ExperimentError(f"unknown record type {kind!r}")
    return log


def save_session(log: SessionLog, path: str | Path) -> None:
    Path(path).write_text(session_to_jsonl(log), encoding="utf-8")


def load_session(path: str | Path) -> SessionLog:
    return session_from_jsonl(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# Aggregates. All are permutation-invariant in logs and responses.

def distinct_sensation_stats(logs: Sequence[SessionLog]) -> dict[str, float]:
    """Sample mean and unbiased variance of the distinct-sensation counts."""
    counts = [log.distinct_sensation_count for log in logs]
    if not counts:
        raise ExperimentError("no session logs given")
    if any(c is None for c in counts):
        raise ExperimentError("every log needs a distinct_sensation_count")
    if len(counts) < 2:
        raise ExperimentError("unbiased variance needs at least 2 sessions")
    n = len(counts)
    mean = sum(counts) / n
    variance = sum((c - mean) ** 2 for c in counts) / (n - 1)
    return {"mean": mean, "variance": variance}


def acceptability_summary(logs: Sequence[SessionLog]) -> dict[Condition, float]:
    """Per-condition fraction of participants who accepted the sensation as cloth.

    Logs missing a condition are excluded from that condition's denominator.
    """
    if not logs:
        raise ExperimentError("no session logs given")
    result: dict[Condition, float] = {}
    for cond in build_condition_grid():
        votes = [
            r.acceptable
            for log in logs
            for r in log.responses
            if r.condition == cond
        ]
        if votes:
            result[cond] = sum(votes) / len(votes)
    return result


def fabric_choice_histogram(
    logs: Sequence[SessionLog],
) -> tuple[dict[int, int], dict[Condition, dict[int, int]]]:
    """Counts of each fabric index chosen as most similar, overall and per condition."""
    if not logs:
        raise ExperimentError("no session logs given")
    overall: dict[int, int] = {}
    per_condition: dict[Condition, dict[int, int]] = {}
    for log in logs:
        for r in log.responses:
            overall[r.similar_fabric] = overall.get(r.similar_fabric, 0) + 1
            slice_ = per_condition.setdefault(r.condition, {})
            slice_[r.similar_fabric] = slice_.get(r.similar_fabric, 0) + 1
    return overall, per_condition


def likert_condition_means(
    logs: Sequence[SessionLog],
) -> dict[Condition, dict[str, float]]:
    """Mean Likert score per (condition, property), in canonical condition order."""
    if not logs:
        raise ExperimentError("no session logs given")
    result: dict[Condition, dict[str, float]] = {}
    for cond in build_condition_grid():
        scores: dict[str, list[int]] = {p: [] for p in LIKERT_PROPERTIES}
        for log in logs:
            for r in log.responses:
                if r.condition == cond:
                    for p in LIKERT_PROPERTIES:
                        scores[p].append(r.likert[p])
        if any(scores[p] for p in LIKERT_PROPERTIES):
            result[cond] = {
                p: sum(vals) / len(vals) for p, vals in scores.items() if vals
            }
    return result


def likert_means_to_csv(means: Mapping[Condition, Mapping[str, float]]) -> str:
    lines = ["condition,property,mean"]
    for cond in build_condition_grid():
        if cond in means:
            for p in LIKERT_PROPERTIES:
                if p in means[cond]:
                    lines.append(f"{cond.label()},{p},{means[cond][p]:.9g}")
    return "\n".join(lines) + "\n"


def acceptability_to_csv(summary: Mapping[Condition, float]) -> str:
    lines = ["condition,accept_fraction"]
    for cond in build_condition_grid():
        if cond in summary:
            lines.append(f"{cond.label()},{summary[cond]:.9g}")
    return "\n".join(lines) + "\n"
