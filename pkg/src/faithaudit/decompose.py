"""Answer to claim decomposition, per sentence or over the whole answer."""

from __future__ import annotations

import logging
from concurrent.futures import Executor
from dataclasses import dataclass, field

from .judge import Decoding, Judge, JudgeError, JudgeRequest, JudgeResponse, Role
from .model import Claim
from .segmentation import Sentence, segment_sentences

logger = logging.getLogger(__name__)

SENTENCE = "sentence"
HOLISTIC = "holistic"
MODES = (SENTENCE, HOLISTIC)


@dataclass
class Decomposition:
    claims: list[Claim]
    mode: str
    sentences: list[Sentence] = field(default_factory=list)
    errors: list[dict] = field(default_factory=list)
    responses: list[JudgeResponse] = field(default_factory=list)


def claim_key(text: str) -> str:
    return " ".join(text.lower().split())


def _call(judge: Judge, request: JudgeRequest) -> JudgeResponse | JudgeError:
    try:
        return judge.submit(request)
    except JudgeError as exc:
        return exc


def _dedup(pieces: list[tuple[str, Sentence | None]]) -> list[Claim]:
    seen: set[str] = set()
    claims = []
    for text, sentence in pieces:
        key = claim_key(text)
        if not key or key in seen:
            continue
        seen.add(key)
        if sentence is None:
            claims.append(Claim(len(claims) + 1, text))
        else:
            claims.append(Claim(len(claims) + 1, text, sentence.index, sentence.span))
    return claims


def decompose_sentence_based(
    answer: str,
    judge: Judge,
    decoding: Decoding = Decoding(),
    executor: Executor | None = None,
    sample_id: str = "",
) -> Decomposition:
    """One DECOMPOSE call per answer sentence; the judge never sees the context.

    Claims are numbered from 1 in (sentence, emission) order and point back
    at their sentence. A failing sentence contributes no claims and an error
    record.
    """
    sentences = segment_sentences(answer)
    requests = [
        JudgeRequest(Role.DECOMPOSE, passage=s.text, decoding=decoding, request_id=f"{sample_id}/decompose/{s.index}")
        for s in sentences
    ]
    mapper = executor.map if executor is not None else map
    outcomes = list(mapper(lambda r: _call(judge, r), requests))

    result = Decomposition([], SENTENCE, sentences)
    pieces: list[tuple[str, Sentence | None]] = []
    for sentence, outcome in zip(sentences, outcomes):
        if isinstance(outcome, JudgeError):
            logger.warning("decomposition failed for sentence %d: %s", sentence.index, outcome)
            result.errors.append({"stage": "decompose", "sentence_index": sentence.index, "error": str(outcome)})
            continue
        result.responses.append(outcome)
        pieces.extend((text, sentence) for text in outcome.claims)
    result.claims = _dedup(pieces)
    return result


def decompose_holistic(
    answer: str,
    judge: Judge,
    decoding: Decoding = Decoding(),
    sample_id: str = "",
) -> Decomposition:
    """A single DECOMPOSE call over the full answer. Claims carry no answer spans."""
    result = Decomposition([], HOLISTIC)
    if not answer.strip():
        return result
    request = JudgeRequest(Role.DECOMPOSE, passage=answer, decoding=decoding, request_id=f"{sample_id}/decompose/all")
    outcome = _call(judge, request)
    if isinstance(outcome, JudgeError):
        result.errors.append({"stage": "decompose", "sentence_index": None, "error": str(outcome)})
        return result
    result.responses.append(outcome)
    result.claims = _dedup([(text, None) for text in outcome.claims])
    return result


def decompose(answer: str, judge: Judge, mode: str = SENTENCE, **kwargs) -> Decomposition:
    if mode == SENTENCE:
        return decompose_sentence_based(answer, judge, **kwargs)
    if mode == HOLISTIC:
        kwargs.pop("executor", None)
        return decompose_holistic(answer, judge, **kwargs)
    raise ValueError(f"unknown decomposition mode {mode!r}; expected one of {MODES}")
