"""Answer-side span localization and context-side evidence grounding."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .model import CON, ENT, NIC, CharSpan, Claim, ClaimVerdict, EvidenceSpan, Label
from .segmentation import Sentence
from .spans import merge

FUZZY_THRESHOLD = 0.8

_TOKEN = re.compile(r"\w+")


class SpansUnavailable(ValueError):
    """Claims without answer pointers (holistic mode) cannot be localized."""


@dataclass(frozen=True)
class AnswerSpanSet:
    contradicted: tuple[CharSpan, ...] = ()
    baseless: tuple[CharSpan, ...] = ()
    entailed: tuple[CharSpan, ...] = ()
    hallucinated: tuple[CharSpan, ...] = ()

    def to_dict(self) -> dict:
        return {name: [s.to_list() for s in getattr(self, name)] for name in
                ("contradicted", "baseless", "entailed", "hallucinated")}

    @classmethod
    def from_dict(cls, d: dict) -> "AnswerSpanSet":
        return cls(**{name: tuple(CharSpan.from_list(s) for s in spans) for name, spans in d.items()})

    def label_at(self, offset: int) -> Label | None:
        """Per-character attribution for reports: CONTRADICTED > BASELESS > ENTAILED."""
        for label, spans in ((CON, self.contradicted), (NIC, self.baseless), (ENT, self.entailed)):
            if any(s.start <= offset < s.end for s in spans):
                return label
        return None


def localize_answer(claims: Sequence[Claim], verdicts: Sequence[ClaimVerdict]) -> AnswerSpanSet:
    """Project each claim's final label onto its source answer sentence."""
    by_id = {v.claim_id: v for v in verdicts}
    buckets: dict[Label, list[CharSpan]] = {CON: [], NIC: [], ENT: []}
    for claim in claims:
        if claim.source_span is None:
            raise SpansUnavailable(f"claim {claim.id} has no answer span (holistic decomposition)")
        buckets[by_id[claim.id].final_label].append(claim.source_span)
    return AnswerSpanSet(
        contradicted=tuple(merge(buckets[CON])),
        baseless=tuple(merge(buckets[NIC])),
        entailed=tuple(merge(buckets[ENT])),
        hallucinated=tuple(merge(buckets[CON] + buckets[NIC])),
    )


def normalize_with_map(text: str) -> tuple[str, list[int]]:
    """Casefold and collapse whitespace runs to one space.

    Returns the normalized string and, for each of its characters, the index
    of the source character it came from.
    """
    out: list[str] = []
    index: list[int] = []
    for i, ch in enumerate(text):
        if ch.isspace():
            if out and out[-1] == " ":
                continue
            out.append(" ")
            index.append(i)
        else:
            for folded in ch.casefold():
                out.append(folded)
                index.append(i)
    return "".join(out), index


def tokens(text: str) -> list[str]:
    return _TOKEN.findall(text.casefold())


def overlap_ratio(a: Sequence[str], b: Sequence[str]) -> float:
    """Multiset token overlap divided by the longer sequence length."""
    if not a or not b:
        return 0.0
    shared = sum((Counter(a) & Counter(b)).values())
    return shared / max(len(a), len(b))


def _anchor(start: int, end: int, context: str, sentences: Sequence[Sentence], tier: int, score: float,
            multiplicity: int) -> EvidenceSpan | None:
    hit = [s for s in sentences if s.span.start < end and start < s.span.end]
    if not hit:
        return None
    start = max(start, hit[0].span.start)
    end = min(end, hit[-1].span.end)
    return EvidenceSpan(tuple(s.index for s in hit), CharSpan(start, end), context[start:end], tier, score,
                        multiplicity)


def ground_evidence(evidence_text: str, context: str, sentences: Sequence[Sentence],
                    threshold: float = FUZZY_THRESHOLD) -> EvidenceSpan | None:
    """Align a judge's evidence string to the context.

    Tries an exact substring match, then a whitespace/case-insensitive match,
    then the best contiguous window of sentences by token overlap (accepted
    at ``threshold`` or above). The earliest occurrence wins when the text
    repeats. Returns ``None`` when nothing aligns.
    """
    needle = evidence_text.strip()
    if not needle or not sentences:
        return None

    pos = context.find(needle)
    if pos >= 0:
        return _anchor(pos, pos + len(needle), context, sentences, 1, 1.0, context.count(needle))

    norm_ctx, index = normalize_with_map(context)
    norm_needle, _ = normalize_with_map(needle)
    pos = norm_ctx.find(norm_needle)
    if pos >= 0:
        start, end = index[pos], index[pos + len(norm_needle) - 1] + 1
        return _anchor(start, end, context, sentences, 2, 1.0, norm_ctx.count(norm_needle))

    want = tokens(needle)
    if not want:
        return None
    sent_tokens = [tokens(s.text) for s in sentences]
    # windows longer than len(want) / threshold tokens cannot reach the threshold
    limit = len(want) / threshold
    best: tuple[float, int, int] | None = None
    for i in range(len(sentences)):
        window: list[str] = []
        for j in range(i, len(sentences)):
            window = window + sent_tokens[j]
            if len(window) > limit:
                break
            ratio = overlap_ratio(want, window)
            if best is None or ratio > best[0]:
                best = (ratio, i, j)
    if best is None or best[0] < threshold:
        return None
    ratio, i, j = best
    start, end = sentences[i].span.start, sentences[j].span.end
    return EvidenceSpan(tuple(range(i, j + 1)), CharSpan(start, end), context[start:end], 3, ratio, 1)
