"""Answer-level and character-overlap span-level precision/recall/F1."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

from .model import CharSpan
from .spans import intersection_length, merge, total_length


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int

    @classmethod
    def from_counts(cls, tp: int, fp: int, fn: int) -> "PRF":
        # 0/0 is scored as 0
        p = tp / (tp + fp) if tp + fp else 0.0
        r = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * p * r / (p + r) if p + r else 0.0
        return cls(p, r, f1, tp, fp, fn)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SpanEvalInput:
    gold_spans: tuple[CharSpan, ...]
    pred_spans: tuple[CharSpan, ...]
    text_length: int

    def __init__(self, gold_spans: Iterable[CharSpan], pred_spans: Iterable[CharSpan], text_length: int):
        object.__setattr__(self, "gold_spans", tuple(gold_spans))
        object.__setattr__(self, "pred_spans", tuple(pred_spans))
        object.__setattr__(self, "text_length", text_length)
        for span in self.gold_spans + self.pred_spans:
            if span.end > text_length:
                raise ValueError(f"span [{span.start}, {span.end}) exceeds text length {text_length}")


def answer_prf(predictions: Sequence[bool], gold: Sequence[bool]) -> PRF:
    """Sample-level P/R/F1 with "hallucinated" as the positive class."""
    if len(predictions) != len(gold):
        raise ValueError(f"length mismatch: {len(predictions)} predictions vs {len(gold)} gold labels")
    tp = sum(1 for p, g in zip(predictions, gold) if p and g)
    fp = sum(1 for p, g in zip(predictions, gold) if p and not g)
    fn = sum(1 for p, g in zip(predictions, gold) if g and not p)
    return PRF.from_counts(tp, fp, fn)


def span_micro_prf(samples: Iterable[SpanEvalInput]) -> PRF:
    """Micro P/R/F1 over character offsets, summed across samples.

    Per sample, gold and predicted spans are each unioned first, so
    overlapping annotations are counted once.
    """
    tp = fp = fn = 0
    for sample in samples:
        gold = merge(sample.gold_spans)
        pred = merge(sample.pred_spans)
        inter = intersection_length(gold, pred)
        tp += inter
        fp += total_length(pred) - inter
        fn += total_length(gold) - inter
    return PRF.from_counts(tp, fp, fn)


def evidence_grounding_prf(conflict_cases: Iterable[SpanEvalInput]) -> PRF:
    """Refuting-evidence overlap over context offsets.

    Callers pass only correctly detected contradiction cases whose gold
    evidence could be aligned to the context.
    """
    return span_micro_prf(conflict_cases)
