from .base import (
    Decoding,
    Judge,
    JudgeError,
    JudgeRequest,
    JudgeResponse,
    ParseError,
    Role,
    ScriptKeyError,
    TransportError,
    Usage,
    parse_structured,
    serialize,
)
from .cost import CostLedger, PriceTable, cost_ledger
from .prompts import PROMPT_VERSION
from .remote import RemoteJudge, api_key_from_env
from .scripted import ScriptedJudge, request_key, script_key

__all__ = [
    "CostLedger",
    "Decoding",
    "Judge",
    "JudgeError",
    "JudgeRequest",
    "JudgeResponse",
    "PROMPT_VERSION",
    "ParseError",
    "PriceTable",
    "RemoteJudge",
    "Role",
    "ScriptKeyError",
    "ScriptedJudge",
    "TransportError",
    "Usage",
    "api_key_from_env",
    "cost_ledger",
    "parse_structured",
    "request_key",
    "script_key",
    "serialize",
]
