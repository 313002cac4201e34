"""Judge request/response types and the strict structured-output parser."""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, replace
from typing import Protocol

from ..model import Label


class Role(str, enum.Enum):
    DECOMPOSE = "DECOMPOSE"
    LOCAL = "LOCAL"
    GLOBAL = "GLOBAL"


class JudgeError(Exception):
    """A judge call failed for good (retries exhausted or unrecoverable)."""


class TransportError(JudgeError):
    pass


class ParseError(JudgeError):
    def __init__(self, message: str, excerpt: str = ""):
        super().__init__(message)
        self.excerpt = excerpt


class ScriptKeyError(KeyError):
    """The scripted judge has no answer for a request. Deliberately not a JudgeError:
    a script miss is a broken fixture, not a judge failure to degrade around."""


@dataclass(frozen=True)
class Decoding:
    temperature: float = 0.0
    seed: int = 42


@dataclass(frozen=True)
class JudgeRequest:
    role: Role
    passage: str
    claim: str | None = None
    question: str | None = None
    focus: str | None = None
    local_label: Label | None = None
    decoding: Decoding = Decoding()
    request_id: str = ""

    def __post_init__(self) -> None:
        if self.role is not Role.DECOMPOSE and not self.claim:
            raise ValueError(f"{self.role.value} request needs a claim")
        if self.role is Role.GLOBAL:
            if self.local_label is None:
                raise ValueError("GLOBAL request needs the local label")
            if (self.focus is not None) != (self.local_label is not Label.BASELESS):
                raise ValueError("focus chunk is given iff the local label is ENTAILED or CONTRADICTED")


@dataclass(frozen=True)
class Usage:
    prompt_tokens: int = 0
    completion_tokens: int = 0

    def __add__(self, other: "Usage") -> "Usage":
        return Usage(self.prompt_tokens + other.prompt_tokens, self.completion_tokens + other.completion_tokens)


@dataclass(frozen=True)
class JudgeResponse:
    role: Role
    claims: tuple[str, ...] = ()
    label: Label | None = None
    evidence: tuple[str, ...] = ()
    usage: Usage = Usage()
    repaired: bool = False
    request_id: str = ""

    def payload(self) -> dict:
        if self.role is Role.DECOMPOSE:
            return {"claims": list(self.claims)}
        return {"label": self.label.value, "evidence": list(self.evidence)}


class Judge(Protocol):
    def submit(self, request: JudgeRequest) -> JudgeResponse: ...


def serialize(response: JudgeResponse) -> str:
    return json.dumps(response.payload(), ensure_ascii=False)


_FENCE = re.compile(r"^\s*```(?:json)?\s*\n(.*)\n\s*```\s*$", re.DOTALL)


def _string_list(value, name: str, raw: str) -> tuple[str, ...]:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise ParseError(f"{name!r} must be a list of strings", raw[:200])
    return tuple(value)


def parse_structured(raw: str, role: Role) -> JudgeResponse:
    """Parse a judge's JSON document for ``role``.

    DECOMPOSE expects ``{"claims": [str, ...]}``; LOCAL and GLOBAL expect
    ``{"label": "ENTAILED"|"CONTRADICTED"|"BASELESS", "evidence": [str, ...]}``.
    Unknown keys, missing keys and other label tokens are rejected. A single
    surrounding markdown code fence is tolerated. A BASELESS document carrying
    evidence is accepted with the evidence dropped and ``repaired`` set.
    """
    fenced = _FENCE.match(raw)
    body = fenced.group(1) if fenced else raw
    try:
        doc = json.loads(body)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc.msg}", raw[:200]) from None
    if not isinstance(doc, dict):
        raise ParseError("top-level value must be an object", raw[:200])

    if role is Role.DECOMPOSE:
        if set(doc) != {"claims"}:
            raise ParseError(f"expected keys {{'claims'}}, got {sorted(doc)}", raw[:200])
        claims = tuple(c.strip() for c in _string_list(doc["claims"], "claims", raw) if c.strip())
        return JudgeResponse(role=role, claims=claims)

    if set(doc) != {"label", "evidence"}:
        raise ParseError(f"expected keys {{'label', 'evidence'}}, got {sorted(doc)}", raw[:200])
    token = doc["label"]
    if not isinstance(token, str) or token not in Label.__members__:
        raise ParseError(f"label must be one of {list(Label.__members__)}, got {token!r}", raw[:200])
    label = Label[token]
    evidence = _string_list(doc["evidence"], "evidence", raw)
    repaired = False
    if label is Label.BASELESS and evidence:
        evidence, repaired = (), True
    return JudgeResponse(role=role, label=label, evidence=evidence, repaired=repaired)


def with_meta(response: JudgeResponse, usage: Usage, request_id: str) -> JudgeResponse:
    return replace(response, usage=usage, request_id=request_id)
