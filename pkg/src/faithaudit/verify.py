"""Two-stage claim verification: per-chunk screening, then full-context re-verification."""

from __future__ import annotations

import logging
from collections import Counter
from concurrent.futures import Executor, ThreadPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass, field
from typing import Sequence

from .decompose import MODES, SENTENCE, decompose
from .judge import Decoding, Judge, JudgeError, JudgeRequest, JudgeResponse, Role, Usage
from .localization import AnswerSpanSet, ground_evidence, localize_answer
from .model import (
    DEGRADED,
    FALLBACK,
    NIC,
    REPAIRED,
    UNGROUNDED,
    AnswerVerdict,
    Claim,
    ClaimVerdict,
    EvidenceSpan,
    Label,
    Violation,
    answer_verdict,
    or_join,
    rr_check,
)
from .segmentation import Chunk, Sentence, check_window, make_chunks, segment_sentences

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "faithaudit-result/1"


@dataclass(frozen=True)
class PipelineConfig:
    window: int = 25
    overlap: int = 10
    mode: str = SENTENCE
    global_verification: bool = True
    temperature: float = 0.0
    seed: int = 42
    concurrency: int = 1

    def validate(self) -> None:
        check_window(self.window, self.overlap)
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.concurrency < 1:
            raise ValueError("concurrency must be >= 1")

    @property
    def decoding(self) -> Decoding:
        return Decoding(self.temperature, self.seed)


@dataclass(frozen=True)
class LocalResult:
    claim_id: int
    assessments: tuple[tuple[int, Label], ...]
    local_label: Label
    focus_chunk: int | None
    provisional_evidence: tuple[tuple[int, tuple[str, ...]], ...] = ()
    failed_chunks: tuple[int, ...] = ()
    repaired_chunks: tuple[int, ...] = ()
    responses: tuple[JudgeResponse, ...] = field(default=(), repr=False, compare=False)


def local_requests(claim: Claim, chunks: Sequence[Chunk], question: str | None, decoding: Decoding,
                   sample_id: str = "") -> list[JudgeRequest]:
    return [
        JudgeRequest(Role.LOCAL, passage=chunk.text, claim=claim.text, question=question or None,
                     decoding=decoding, request_id=f"{sample_id}/local/{claim.id}/{chunk.index}")
        for chunk in chunks
    ]


def assemble_local(claim: Claim, chunks: Sequence[Chunk], outcomes: Sequence[JudgeResponse | JudgeError]) -> LocalResult:
    """Fold per-chunk outcomes (in chunk order) into a local label.

    Failed chunks count as BASELESS and are listed in ``failed_chunks``.
    The focus chunk is the lowest-index chunk whose assessment equals the
    joined label; there is none for BASELESS.
    """
    if not chunks:
        raise ValueError("local verification needs at least one chunk")
    assessments, provisional, failed, repaired, responses = [], [], [], [], []
    for chunk, outcome in zip(chunks, outcomes, strict=True):
        if isinstance(outcome, JudgeError):
            logger.warning("local assessment failed for claim %d chunk %d: %s", claim.id, chunk.index, outcome)
            assessments.append((chunk.index, NIC))
            failed.append(chunk.index)
            continue
        responses.append(outcome)
        assessments.append((chunk.index, outcome.label))
        if outcome.evidence:
            provisional.append((chunk.index, outcome.evidence))
        if outcome.repaired:
            repaired.append(chunk.index)
    local = or_join(label for _, label in assessments)
    focus = None if local is NIC else next(k for k, label in assessments if label is local)
    return LocalResult(claim.id, tuple(assessments), local, focus, tuple(provisional), tuple(failed),
                       tuple(repaired), tuple(responses))


def _submit(judge: Judge, request: JudgeRequest) -> JudgeResponse | JudgeError:
    try:
        return judge.submit(request)
    except JudgeError as exc:
        return exc


def verify_local(claim: Claim, chunks: Sequence[Chunk], question: str | None, judge: Judge,
                 decoding: Decoding = Decoding(), executor: Executor | None = None,
                 sample_id: str = "") -> LocalResult:
    """Assess ``claim`` against every chunk and OR-join the results."""
    requests = local_requests(claim, chunks, question, decoding, sample_id)
    mapper = executor.map if executor is not None else map
    return assemble_local(claim, chunks, list(mapper(lambda r: _submit(judge, r), requests)))


def _ground_all(texts: Sequence[str], context: str, sentences: Sequence[Sentence]
                ) -> tuple[tuple[EvidenceSpan, ...], tuple[str, ...]]:
    grounded: list[EvidenceSpan] = []
    missing: list[str] = []
    for text in texts:
        ev = ground_evidence(text, context, sentences)
        if ev is None:
            missing.append(text)
        elif all(g.span != ev.span for g in grounded):
            grounded.append(ev)
    return tuple(grounded), tuple(missing)


def _verdict_flags(local: LocalResult) -> set[str]:
    return {DEGRADED} if local.failed_chunks else set()


def verify_global(claim: Claim, context: str, sentences: Sequence[Sentence], chunks: Sequence[Chunk],
                  question: str | None, local: LocalResult, judge: Judge,
                  decoding: Decoding = Decoding(), sample_id: str = "",
                  ) -> tuple[ClaimVerdict, JudgeResponse | None]:
    """Re-verify ``claim`` against the full context.

    A locally BASELESS claim is searched from scratch; otherwise the focus
    chunk goes along as a location hint. The final label may move in any
    direction. Evidence is whatever the global judge extracts, grounded into
    context spans; local evidence is never reused. On judge failure the local
    label is kept with no evidence and the verdict is flagged ``fallback``.
    """
    focus_text = chunks[local.focus_chunk].text if local.focus_chunk is not None else None
    request = JudgeRequest(Role.GLOBAL, passage=context, claim=claim.text, question=question or None,
                           focus=focus_text, local_label=local.local_label, decoding=decoding,
                           request_id=f"{sample_id}/global/{claim.id}")
    flags = _verdict_flags(local)
    outcome = _submit(judge, request)
    if isinstance(outcome, JudgeError):
        logger.warning("global verification failed for claim %d: %s", claim.id, outcome)
        flags.add(FALLBACK)
        if local.local_label is not NIC:
            flags.add(DEGRADED)
        verdict = ClaimVerdict(claim.id, local.local_label, local.assessments, local.focus_chunk,
                               local.local_label, flags=frozenset(flags))
        return verdict, None
    if outcome.repaired:
        flags.add(REPAIRED)
    evidence, missing = _ground_all(outcome.evidence, context, sentences)
    if missing or (outcome.label is not NIC and not evidence):
        flags.add(UNGROUNDED)
    verdict = ClaimVerdict(claim.id, local.local_label, local.assessments, local.focus_chunk, outcome.label,
                           evidence, missing, frozenset(flags))
    return verdict, outcome


def local_only_verdict(local: LocalResult, context: str, sentences: Sequence[Sentence]) -> ClaimVerdict:
    """Final verdict when global verification is switched off: the local label stands.

    Evidence is taken from the focus chunk's provisional evidence, the only
    evidence such a run has.
    """
    flags = _verdict_flags(local)
    if local.repaired_chunks:
        flags.add(REPAIRED)
    texts: tuple[str, ...] = ()
    if local.focus_chunk is not None:
        texts = dict(local.provisional_evidence).get(local.focus_chunk, ())
    evidence, missing = _ground_all(texts, context, sentences)
    if missing or (local.local_label is not NIC and not evidence):
        flags.add(UNGROUNDED)
    return ClaimVerdict(local.claim_id, local.local_label, local.assessments, local.focus_chunk,
                        local.local_label, evidence, missing, frozenset(flags))


@dataclass(frozen=True)
class AuditResult:
    sample_id: str
    mode: str
    global_verification: bool
    claims: tuple[Claim, ...]
    verdicts: tuple[ClaimVerdict, ...]
    answer: AnswerVerdict
    answer_spans: AnswerSpanSet | None
    violations: tuple[Violation, ...]
    chunks: tuple[tuple[int, int], ...] = ()
    errors: tuple[dict, ...] = ()
    warnings: tuple[str, ...] = ()
    repairs: int = 0
    usage: Usage = Usage()
    request_counts: tuple[tuple[str, int], ...] = ()

    @property
    def flag_counts(self) -> dict[str, int]:
        counts = Counter(flag for v in self.verdicts for flag in v.flags)
        return dict(sorted(counts.items()))

    @property
    def degraded(self) -> bool:
        return any(v.flags & {DEGRADED, FALLBACK} for v in self.verdicts) or bool(self.errors)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "sample_id": self.sample_id,
            "mode": self.mode,
            "global_verification": self.global_verification,
            "answer_label": self.answer.label.value,
            "hallucinated": self.answer.hallucinated,
            "claims": [c.to_dict() for c in self.claims],
            "chunks": [list(c) for c in self.chunks],
            "verdicts": [v.to_dict() for v in self.verdicts],
            "answer_spans": self.answer_spans.to_dict() if self.answer_spans is not None else None,
            "violations": [v.to_dict() for v in self.violations],
            "flag_counts": self.flag_counts,
            "repairs": self.repairs,
            "errors": list(self.errors),
            "warnings": list(self.warnings),
            "usage": {"prompt_tokens": self.usage.prompt_tokens, "completion_tokens": self.usage.completion_tokens},
            "request_counts": dict(self.request_counts),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AuditResult":
        label = Label(d["answer_label"])
        spans = d.get("answer_spans")
        return cls(
            sample_id=d["sample_id"],
            mode=d["mode"],
            global_verification=d["global_verification"],
            claims=tuple(Claim.from_dict(c) for c in d["claims"]),
            verdicts=tuple(ClaimVerdict.from_dict(v) for v in d["verdicts"]),
            answer=AnswerVerdict(label, d["hallucinated"]),
            answer_spans=AnswerSpanSet.from_dict(spans) if spans is not None else None,
            violations=tuple(Violation.from_dict(v) for v in d["violations"]),
            chunks=tuple(tuple(c) for c in d.get("chunks", [])),
            errors=tuple(d.get("errors", [])),
            warnings=tuple(d.get("warnings", [])),
            repairs=d.get("repairs", 0),
            usage=Usage(**d.get("usage", {})),
            request_counts=tuple(d.get("request_counts", {}).items()),
        )

    def evidence_spans(self, label: Label) -> list:
        return [e.span for v in self.verdicts if v.final_label is label for e in v.evidence]


def run_pipeline(context: str, question: str | None, answer: str, config: PipelineConfig, judge: Judge,
                 sample_id: str = "", executor: Executor | None = None) -> AuditResult:
    """Audit one (context, question, answer) triple end to end.

    All fan-out goes through ``executor`` (a private thread pool sized by
    ``config.concurrency`` when not given); results are merged by claim and
    chunk index, so completion order never affects the output.
    """
    config.validate()
    decoding = config.decoding
    own_pool = executor is None and config.concurrency > 1
    pool_cm = ThreadPoolExecutor(config.concurrency) if own_pool else nullcontext(executor)
    with pool_cm as pool:
        mapper = pool.map if pool is not None else map
        sentences = segment_sentences(context)
        chunks = make_chunks(sentences, config.window, config.overlap, context)

        dec = decompose(answer, judge, config.mode, decoding=decoding, executor=pool, sample_id=sample_id)
        claims = dec.claims
        responses: list[JudgeResponse] = list(dec.responses)
        errors: list[dict] = list(dec.errors)
        warnings: list[str] = []
        requests = Counter({Role.DECOMPOSE.value: len(dec.sentences) if dec.mode == SENTENCE else int(bool(answer.strip()))})

        if not claims:
            warnings.append("no claims extracted; answer treated as vacuously ENTAILED")
        if not chunks:
            # no context to draw evidence from: everything is baseless, no judge calls
            verdicts = [ClaimVerdict(c.id, NIC, (), None, NIC) for c in claims]
            if claims:
                warnings.append("empty context; all claims BASELESS without judge calls")
            repairs = 0
        else:
            all_requests = [r for c in claims for r in local_requests(c, chunks, question, decoding, sample_id)]
            outcomes = list(mapper(lambda r: _submit(judge, r), all_requests))
            requests[Role.LOCAL.value] += len(all_requests)
            locals_: list[LocalResult] = []
            for n, claim in enumerate(claims):
                local = assemble_local(claim, chunks, outcomes[n * len(chunks):(n + 1) * len(chunks)])
                locals_.append(local)
                responses.extend(local.responses)
                errors.extend({"stage": "local", "claim_id": claim.id, "chunk_index": k} for k in local.failed_chunks)
            repairs = sum(len(loc.repaired_chunks) for loc in locals_)

            if config.global_verification:
                pairs = list(mapper(
                    lambda cl: verify_global(cl[0], context, sentences, chunks, question, cl[1], judge, decoding,
                                             sample_id),
                    zip(claims, locals_),
                ))
                requests[Role.GLOBAL.value] += len(claims)
                verdicts = []
                for claim, (verdict, response) in zip(claims, pairs):
                    verdicts.append(verdict)
                    if response is None:
                        errors.append({"stage": "global", "claim_id": claim.id})
                    else:
                        responses.append(response)
                        repairs += int(response.repaired)
            else:
                verdicts = [local_only_verdict(loc, context, sentences) for loc in locals_]

    verdict = answer_verdict(v.final_label for v in verdicts)
    violations = rr_check(verdicts, context)
    spans = localize_answer(claims, verdicts) if config.mode == SENTENCE else None
    usage = sum((r.usage for r in responses), Usage())
    for role in Role:
        requests.setdefault(role.value, 0)
    return AuditResult(
        sample_id=sample_id,
        mode=config.mode,
        global_verification=config.global_verification,
        claims=tuple(claims),
        verdicts=tuple(verdicts),
        answer=verdict,
        answer_spans=spans,
        violations=tuple(violations),
        chunks=tuple((c.first, c.last) for c in chunks),
        errors=tuple(errors),
        warnings=tuple(warnings),
        repairs=repairs,
        usage=usage,
        request_counts=tuple((role.value, requests[role.value]) for role in Role),
    )
