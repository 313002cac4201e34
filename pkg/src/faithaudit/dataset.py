"""Benchmark ingestion (native and RAGTruth-family JSONL) and result serialization."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .model import CharSpan
from .verify import AuditResult

logger = logging.getLogger(__name__)

FORMATS = ("native", "ragtruth", "ragtruth-plus", "ragtruth-enhance")
TASK_TYPES = ("QA", "SUMMARY", "DATA2TEXT")
_TASK_ALIASES = {
    "qa": "QA",
    "summary": "SUMMARY",
    "summarization": "SUMMARY",
    "data2txt": "DATA2TEXT",
    "data2text": "DATA2TEXT",
    "data-to-text": "DATA2TEXT",
}


class DatasetError(Exception):
    pass


@dataclass(frozen=True)
class GoldSpan:
    span: CharSpan
    tag: str = ""

    @property
    def is_conflict(self) -> bool:
        tag = self.tag.lower()
        return "conflict" in tag or "contradict" in tag


@dataclass(frozen=True)
class Sample:
    id: str
    task_type: str
    context: str
    answer: str
    question: str | None = None
    gold_hallucinated: bool | None = None
    gold_answer_spans: tuple[GoldSpan, ...] | None = None
    gold_refuting_evidence: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.task_type not in TASK_TYPES:
            raise ValueError(f"task_type must be one of {TASK_TYPES}, got {self.task_type!r}")
        for g in self.gold_answer_spans or ():
            if g.span.end > len(self.answer):
                raise ValueError(f"gold span [{g.span.start}, {g.span.end}) exceeds answer length {len(self.answer)}")

    @property
    def gold_conflict(self) -> bool:
        """Whether gold marks a contradiction: a conflict-tagged span or refuting evidence."""
        return any(g.is_conflict for g in self.gold_answer_spans or ()) or bool(self.gold_refuting_evidence)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "task_type": self.task_type,
            "context": self.context,
            "question": self.question,
            "answer": self.answer,
            "gold_hallucinated": self.gold_hallucinated,
            "gold_answer_spans": None if self.gold_answer_spans is None else [
                {"start": g.span.start, "end": g.span.end, "label": g.tag} for g in self.gold_answer_spans
            ],
            "gold_refuting_evidence": None if self.gold_refuting_evidence is None else list(self.gold_refuting_evidence),
        }


class Dataset(list):
    """A list of samples that also remembers which input lines were rejected."""

    def __init__(self, samples: Iterable[Sample] = (), errors: Sequence[dict] = ()):
        super().__init__(samples)
        self.errors = list(errors)


def _task(value) -> str:
    if value is None:
        return "QA"
    key = str(value).strip()
    return _TASK_ALIASES.get(key.lower(), key.upper())


def _spans(raw, label_keys=("label", "label_type", "type")) -> tuple[GoldSpan, ...] | None:
    if raw is None:
        return None
    out = []
    for item in raw:
        if isinstance(item, dict):
            tag = next((str(item[k]) for k in label_keys if item.get(k) is not None), "")
            out.append(GoldSpan(CharSpan(int(item["start"]), int(item["end"])), tag))
        else:
            start, end = item[:2]
            out.append(GoldSpan(CharSpan(int(start), int(end)), str(item[2]) if len(item) > 2 else ""))
    return tuple(out)


def _evidence(raw) -> tuple[str, ...] | None:
    if raw is None:
        return None
    return tuple(item["text"] if isinstance(item, dict) else str(item) for item in raw)


def _from_native(rec: dict) -> Sample:
    return Sample(
        id=str(rec["id"]),
        task_type=_task(rec.get("task_type")),
        context=rec["context"],
        question=rec.get("question") or None,
        answer=rec["answer"],
        gold_hallucinated=rec.get("gold_hallucinated"),
        gold_answer_spans=_spans(rec.get("gold_answer_spans")),
        gold_refuting_evidence=_evidence(rec.get("gold_refuting_evidence")),
    )


def _ragtruth_source(info, question):
    """Flatten RAGTruth ``source_info`` into (context, question)."""
    if isinstance(info, str):
        return info, question
    if isinstance(info, dict) and "passages" in info:
        return str(info["passages"]), question or info.get("question")
    return json.dumps(info, ensure_ascii=False), question


def _from_ragtruth(rec: dict, fmt: str, sources: dict) -> Sample:
    source = rec.get("source_info")
    if source is None and "context" in rec:
        source = rec["context"]
    task = rec.get("task_type")
    if source is None:
        src = sources.get(str(rec.get("source_id")))
        if src is None:
            raise KeyError(f"no source_info for source_id {rec.get('source_id')!r}")
        source, task = src.get("source_info"), task or src.get("task_type")
    context, question = _ragtruth_source(source, rec.get("question") or rec.get("query"))
    answer = rec["response"] if "response" in rec else rec["answer"]
    labels = rec.get("labels", rec.get("hallucination_spans", rec.get("gold_answer_spans")))
    spans = _spans(labels)
    hallucinated = rec.get("hallucinated", rec.get("gold_hallucinated"))
    if hallucinated is None and spans is not None:
        hallucinated = bool(spans)
    refuting = None
    if fmt == "ragtruth-enhance":
        refuting = _evidence(rec.get("refuting_evidence", rec.get("gold_refuting_evidence")))
    return Sample(
        id=str(rec.get("id", rec.get("response_id"))),
        task_type=_task(task),
        context=context,
        question=question or None,
        answer=answer,
        gold_hallucinated=None if hallucinated is None else bool(hallucinated),
        gold_answer_spans=spans,
        gold_refuting_evidence=refuting,
    )


def _source_table(path: Path) -> dict:
    table = {}
    sidecar = path.parent / "source_info.jsonl"
    if sidecar.exists() and sidecar != path:
        for line in sidecar.read_text(encoding="utf-8").splitlines():
            if line.strip():
                rec = json.loads(line)
                table[str(rec["source_id"])] = rec
    return table


def load_dataset(path: str | Path, format_tag: str = "native") -> Dataset:
    """Load one sample per JSON line.

    Bad lines (invalid JSON, missing fields, gold spans past the answer end)
    are skipped and recorded in ``Dataset.errors``; the rest still load. For
    the RAGTruth formats, a ``source_info.jsonl`` next to the file is joined
    on ``source_id`` when records do not embed their source.
    """
    if format_tag not in FORMATS:
        raise DatasetError(f"unknown format {format_tag!r}; expected one of {FORMATS}")
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc}") from exc
    sources = {} if format_tag == "native" else _source_table(path)
    samples, errors = [], []
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            if not isinstance(rec, dict):
                raise ValueError("record is not an object")
            sample = _from_native(rec) if format_tag == "native" else _from_ragtruth(rec, format_tag, sources)
        except (ValueError, KeyError, TypeError) as exc:
            errors.append({"line": lineno, "error": f"{type(exc).__name__}: {exc}", "excerpt": line[:200]})
            continue
        samples.append(sample)
    if errors:
        logger.warning("%s: rejected %d malformed line(s)", path, len(errors))
    if not samples:
        raise DatasetError(f"{path}: no valid records ({len(errors)} rejected)")
    return Dataset(samples, errors)


def _dump_lines(records: Iterable[dict], path: str | Path) -> None:
    text = "".join(json.dumps(rec, ensure_ascii=False) + "\n" for rec in records)
    Path(path).write_text(text, encoding="utf-8")


def write_samples(samples: Iterable[Sample], path: str | Path) -> None:
    _dump_lines((s.to_dict() for s in samples), path)


def write_results(results: Iterable[AuditResult], path: str | Path) -> None:
    _dump_lines((r.to_dict() for r in results), path)


def read_results(path: str | Path) -> list[AuditResult]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            out.append(AuditResult.from_dict(json.loads(line)))
    return out
