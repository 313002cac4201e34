"""Label algebra, trace types and the grounding check over a verification trace."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Iterable

logger = logging.getLogger(__name__)


class Label(str, enum.Enum):
    ENTAILED = "ENTAILED"
    CONTRADICTED = "CONTRADICTED"
    BASELESS = "BASELESS"

    @property
    def short(self) -> str:
        return {"ENTAILED": "ENT", "CONTRADICTED": "CON", "BASELESS": "NIC"}[self.value]

    @classmethod
    def parse(cls, token: str) -> "Label":
        """Strict lookup; accepts the full token or the three-letter short form."""
        for label in cls:
            if token == label.value or token == label.short:
                return label
        raise ValueError(f"unknown label token {token!r}")


ENT, CON, NIC = Label.ENTAILED, Label.CONTRADICTED, Label.BASELESS


@dataclass(frozen=True, order=True)
class CharSpan:
    """Half-open ``[start, end)`` range of character (code point) offsets."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if not 0 <= self.start <= self.end:
            raise ValueError(f"invalid span [{self.start}, {self.end})")

    def __len__(self) -> int:
        return self.end - self.start

    @property
    def empty(self) -> bool:
        return self.start == self.end

    def to_list(self) -> list[int]:
        return [self.start, self.end]

    @classmethod
    def from_list(cls, pair) -> "CharSpan":
        start, end = pair
        return cls(int(start), int(end))


@dataclass(frozen=True)
class Claim:
    id: int
    text: str
    source_sentence_index: int | None = None
    source_span: CharSpan | None = None

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValueError("claim text is empty")
        if (self.source_sentence_index is None) != (self.source_span is None):
            raise ValueError("source_sentence_index and source_span must be set together")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "text": self.text,
            "source_sentence_index": self.source_sentence_index,
            "source_span": self.source_span.to_list() if self.source_span else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Claim":
        span = d.get("source_span")
        return cls(
            id=d["id"],
            text=d["text"],
            source_sentence_index=d.get("source_sentence_index"),
            source_span=CharSpan.from_list(span) if span is not None else None,
        )


@dataclass(frozen=True)
class EvidenceSpan:
    """A context excerpt anchored to one or more context sentences.

    ``tier`` and ``score`` record how the judge's evidence text was aligned
    (1 exact, 2 normalized, 3 fuzzy sentence window); ``multiplicity`` is the
    number of places the matched text occurs in the context.
    """

    sentence_indices: tuple[int, ...]
    span: CharSpan
    text: str
    tier: int = 1
    score: float = 1.0
    multiplicity: int = 1

    def to_dict(self) -> dict:
        return {
            "sentence_indices": list(self.sentence_indices),
            "span": self.span.to_list(),
            "text": self.text,
            "tier": self.tier,
            "score": self.score,
            "multiplicity": self.multiplicity,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EvidenceSpan":
        return cls(
            sentence_indices=tuple(d["sentence_indices"]),
            span=CharSpan.from_list(d["span"]),
            text=d["text"],
            tier=d.get("tier", 1),
            score=d.get("score", 1.0),
            multiplicity=d.get("multiplicity", 1),
        )


# Flags a verdict may carry; any of them marks the verdict as knowingly imperfect.
REPAIRED = "repaired"
DEGRADED = "degraded"
FALLBACK = "fallback"
UNGROUNDED = "ungrounded"
EXCUSING_FLAGS = frozenset({REPAIRED, DEGRADED, FALLBACK, UNGROUNDED})


@dataclass(frozen=True)
class ClaimVerdict:
    claim_id: int
    local_label: Label
    chunk_assessments: tuple[tuple[int, Label], ...]
    focus_chunk: int | None
    final_label: Label
    evidence: tuple[EvidenceSpan, ...] = ()
    ungrounded_evidence: tuple[str, ...] = ()
    flags: frozenset[str] = field(default_factory=frozenset)

    def to_dict(self) -> dict:
        return {
            "claim_id": self.claim_id,
            "chunk_assessments": [[k, lab.value] for k, lab in self.chunk_assessments],
            "local_label": self.local_label.value,
            "focus_chunk": self.focus_chunk,
            "final_label": self.final_label.value,
            "evidence": [e.to_dict() for e in self.evidence],
            "ungrounded_evidence": list(self.ungrounded_evidence),
            "flags": sorted(self.flags),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ClaimVerdict":
        return cls(
            claim_id=d["claim_id"],
            local_label=Label(d["local_label"]),
            chunk_assessments=tuple((k, Label(lab)) for k, lab in d["chunk_assessments"]),
            focus_chunk=d.get("focus_chunk"),
            final_label=Label(d["final_label"]),
            evidence=tuple(EvidenceSpan.from_dict(e) for e in d.get("evidence", [])),
            ungrounded_evidence=tuple(d.get("ungrounded_evidence", [])),
            flags=frozenset(d.get("flags", [])),
        )


@dataclass(frozen=True)
class AnswerVerdict:
    label: Label
    hallucinated: bool

    def __post_init__(self) -> None:
        if self.hallucinated != (self.label is not ENT):
            raise ValueError("hallucinated must equal label != ENTAILED")


def _priority_join(labels: Iterable[Label], order: tuple[Label, Label, Label]) -> Label | None:
    seen = set(labels)
    for label in order:
        if label in seen:
            return label
    return None


def or_join(labels: Iterable[Label]) -> Label:
    """Merge per-chunk assessments: contradiction dominates, one entailing chunk suffices."""
    joined = _priority_join(labels, (CON, ENT, NIC))
    if joined is None:
        raise ValueError("or_join needs at least one label")
    return joined


def and_join(labels: Iterable[Label]) -> Label:
    """Merge final claim labels into an answer label (CON > NIC > ENT).

    An empty collection is vacuously ENTAILED.
    """
    joined = _priority_join(labels, (CON, NIC, ENT))
    if joined is None:
        logger.warning("and_join over zero claims; answer treated as vacuously ENTAILED")
        return ENT
    return joined


def answer_verdict(final_labels: Iterable[Label]) -> AnswerVerdict:
    label = and_join(final_labels)
    return AnswerVerdict(label=label, hallucinated=label is not ENT)


@dataclass(frozen=True)
class Violation:
    claim_id: int
    clause: str  # "a": baseless with evidence, "b": missing evidence, "c": not grounded in context
    detail: str

    def to_dict(self) -> dict:
        return {"claim_id": self.claim_id, "clause": self.clause, "detail": self.detail}

    @classmethod
    def from_dict(cls, d: dict) -> "Violation":
        return cls(d["claim_id"], d["clause"], d["detail"])


def rr_check(trace: Iterable[ClaimVerdict], context: str) -> list[Violation]:
    """Check that every trace element is grounded in, and consistent with, the context."""
    violations = []
    for v in trace:
        if v.final_label is NIC and v.evidence:
            violations.append(
                Violation(v.claim_id, "a", f"BASELESS verdict carries {len(v.evidence)} evidence span(s)")
            )
        if v.final_label is not NIC and not v.evidence:
            violations.append(Violation(v.claim_id, "b", f"{v.final_label.value} verdict has no evidence"))
        for ev in v.evidence:
            if ev.span.end > len(context) or context[ev.span.start:ev.span.end] != ev.text:
                violations.append(
                    Violation(v.claim_id, "c", f"evidence at [{ev.span.start}, {ev.span.end}) does not match context")
                )
        for text in v.ungrounded_evidence:
            violations.append(Violation(v.claim_id, "c", f"evidence text not found in context: {text[:60]!r}"))
    return violations
