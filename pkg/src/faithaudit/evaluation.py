"""Score audit results against gold annotations."""

from __future__ import annotations

from typing import Sequence

from .dataset import Sample
from .localization import ground_evidence
from .metrics import PRF, SpanEvalInput, answer_prf, evidence_grounding_prf, span_micro_prf
from .model import CON
from .segmentation import segment_sentences
from .verify import AuditResult


class IdMismatchError(ValueError):
    def __init__(self, missing: list[str], unexpected: list[str]):
        self.missing = missing
        self.unexpected = unexpected
        super().__init__(f"result/dataset ids differ: missing results for {missing}, unknown ids {unexpected}")


def match_results(samples: Sequence[Sample], results: Sequence[AuditResult]) -> list[tuple[Sample, AuditResult]]:
    by_id = {r.sample_id: r for r in results}
    sample_ids = {s.id for s in samples}
    missing = [s.id for s in samples if s.id not in by_id]
    unexpected = sorted(i for i in by_id if i not in sample_ids)
    if missing or unexpected:
        raise IdMismatchError(missing, unexpected)
    return [(s, by_id[s.id]) for s in samples]


def gold_evidence_spans(sample: Sample) -> list:
    """Align gold refuting-evidence strings to the context; unalignable strings are dropped."""
    sentences = segment_sentences(sample.context)
    spans = []
    for text in sample.gold_refuting_evidence or ():
        ev = ground_evidence(text, sample.context, sentences)
        if ev is not None:
            spans.append(ev.span)
    return spans


def evaluate(pairs: Sequence[tuple[Sample, AuditResult]]) -> dict:
    """All three metric families over the pairs that carry the needed gold fields.

    Returns ``{"answer", "span", "conflict_detection", "evidence_grounding"}``
    mapping to PRF dicts plus the number of samples scored; ``span`` is
    ``None`` when any result comes from holistic decomposition.
    """
    out: dict = {}

    scored = [(s, r) for s, r in pairs if s.gold_hallucinated is not None]
    out["answer"] = _with_n(answer_prf([r.answer.hallucinated for _, r in scored],
                                       [s.gold_hallucinated for s, _ in scored]), len(scored))

    span_pairs = [(s, r) for s, r in pairs if s.gold_answer_spans is not None]
    if any(r.answer_spans is None for _, r in span_pairs):
        out["span"] = None
    else:
        inputs = [SpanEvalInput([g.span for g in s.gold_answer_spans], r.answer_spans.hallucinated, len(s.answer))
                  for s, r in span_pairs]
        out["span"] = _with_n(span_micro_prf(inputs), len(inputs))

    conflict_known = [(s, r) for s, r in pairs if s.gold_answer_spans is not None or s.gold_refuting_evidence is not None]
    out["conflict_detection"] = _with_n(answer_prf([r.answer.label is CON for _, r in conflict_known],
                                                   [s.gold_conflict for s, _ in conflict_known]), len(conflict_known))

    cases = []
    for s, r in pairs:
        if r.answer.label is not CON or not s.gold_conflict:
            continue
        gold = gold_evidence_spans(s)
        if gold:
            cases.append(SpanEvalInput(gold, r.evidence_spans(CON), len(s.context)))
    out["evidence_grounding"] = _with_n(evidence_grounding_prf(cases), len(cases))
    return out


def _with_n(prf: PRF, n: int) -> dict:
    return {**prf.to_dict(), "n": n}
