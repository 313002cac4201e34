"""Deterministic table-driven judge for offline runs and golden traces."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Iterable

from ..model import Label
from .base import JudgeRequest, JudgeResponse, Role, ScriptKeyError, Usage, parse_structured, serialize, with_meta


def script_key(role: Role | str, claim: str | None, passage: str, local_label: Label | str | None = None) -> str:
    """Stable content hash of the fields that identify a judge call."""
    role = Role(role).value
    if isinstance(local_label, Label):
        local_label = local_label.value
    blob = json.dumps([role, claim, passage, local_label], ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:32]


def request_key(request: JudgeRequest) -> str:
    return script_key(request.role, request.claim, request.passage, request.local_label)


def _word_count(*parts: str | None) -> int:
    return sum(len(p.split()) for p in parts if p)


class ScriptedJudge:
    """Answers judge requests from a fixed table keyed by :func:`script_key`.

    Each entry is the raw response document the judge would have produced;
    it goes through :func:`parse_structured` like a remote reply. Reported
    usage is a word count of the request fields and of the document, so cost
    accounting is exercised deterministically.

    A missing key raises :class:`ScriptKeyError` unless ``default`` is given,
    in which case that document is returned for every unknown LOCAL/GLOBAL
    request.
    """

    identity = "scripted"

    def __init__(self, entries: dict[str, str] | None = None, default: str | None = None):
        self.entries: dict[str, str] = dict(entries or {})
        self.default = default

    def add(self, role, claim, passage, response, local_label=None) -> str:
        doc = response if isinstance(response, str) else json.dumps(response, ensure_ascii=False)
        key = script_key(role, claim, passage, local_label)
        self.entries[key] = doc
        return key

    def submit(self, request: JudgeRequest) -> JudgeResponse:
        key = request_key(request)
        doc = self.entries.get(key)
        if doc is None:
            if self.default is None or request.role is Role.DECOMPOSE:
                raise ScriptKeyError(f"no scripted answer for {request.role.value} key {key}")
            doc = self.default
        response = parse_structured(doc, request.role)
        usage = Usage(
            _word_count(request.claim, request.question, request.passage, request.focus),
            _word_count(serialize(response)),
        )
        return with_meta(response, usage, request.request_id)

    # script files: JSON lines of {"key": ..., "response": {...}} plus optional readable fields

    @classmethod
    def from_dir(cls, path: str | Path) -> "ScriptedJudge":
        path = Path(path)
        files = sorted(path.glob("*.jsonl")) if path.is_dir() else [path]
        if not files:
            raise FileNotFoundError(f"no *.jsonl script files in {path}")
        judge = cls()
        for file in files:
            for lineno, line in enumerate(file.read_text(encoding="utf-8").splitlines(), 1):
                if not line.strip():
                    continue
                rec = json.loads(line)
                key = rec.get("key") or script_key(rec["role"], rec.get("claim"), rec["passage"], rec.get("local_label"))
                response = rec["response"]
                judge.entries[key] = response if isinstance(response, str) else json.dumps(response, ensure_ascii=False)
        return judge

    @staticmethod
    def write_script(path: str | Path, records: Iterable[dict]) -> None:
        """Write script records (role, claim, passage, local_label, response) with their keys."""
        lines = []
        for rec in records:
            key = script_key(rec["role"], rec.get("claim"), rec["passage"], rec.get("local_label"))
            lines.append(json.dumps({"key": key, **rec}, ensure_ascii=False))
        Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")
