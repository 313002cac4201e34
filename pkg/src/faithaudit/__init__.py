"""Claim-level context-faithfulness auditing for retrieval-augmented generation."""

from .dataset import Dataset, Sample, load_dataset, read_results, write_results, write_samples
from .decompose import decompose_holistic, decompose_sentence_based
from .estimator import HallucinationAuditor
from .localization import AnswerSpanSet, ground_evidence, localize_answer
from .metrics import PRF, SpanEvalInput, answer_prf, evidence_grounding_prf, span_micro_prf
from .model import (
    AnswerVerdict,
    CharSpan,
    Claim,
    ClaimVerdict,
    EvidenceSpan,
    Label,
    Violation,
    and_join,
    answer_verdict,
    or_join,
    rr_check,
)
from .segmentation import Chunk, Sentence, make_chunks, segment_sentences
from .verify import AuditResult, LocalResult, PipelineConfig, run_pipeline, verify_global, verify_local

__version__ = "0.1.0"

__all__ = [
    "AnswerSpanSet",
    "AnswerVerdict",
    "AuditResult",
    "CharSpan",
    "Chunk",
    "Claim",
    "ClaimVerdict",
    "Dataset",
    "EvidenceSpan",
    "HallucinationAuditor",
    "Label",
    "LocalResult",
    "PRF",
    "PipelineConfig",
    "Sample",
    "Sentence",
    "SpanEvalInput",
    "Violation",
    "and_join",
    "answer_prf",
    "answer_verdict",
    "decompose_holistic",
    "decompose_sentence_based",
    "evidence_grounding_prf",
    "ground_evidence",
    "load_dataset",
    "localize_answer",
    "make_chunks",
    "or_join",
    "read_results",
    "rr_check",
    "run_pipeline",
    "segment_sentences",
    "span_micro_prf",
    "verify_global",
    "verify_local",
    "write_results",
    "write_samples",
]
