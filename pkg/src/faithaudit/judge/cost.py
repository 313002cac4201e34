from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path
from typing import Iterable

from .base import JudgeResponse, Usage


@dataclass(frozen=True)
class PriceTable:
    """Currency per ``per_tokens`` prompt/completion tokens. Decimal keeps sums exact."""

    prompt: Decimal = Decimal(0)
    completion: Decimal = Decimal(0)
    per_tokens: int = 1_000_000

    @classmethod
    def load(cls, path: str | Path) -> "PriceTable":
        d = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(Decimal(str(d["prompt"])), Decimal(str(d["completion"])), int(d.get("per_tokens", 1_000_000)))

    def to_dict(self) -> dict:
        return {"prompt": str(self.prompt), "completion": str(self.completion), "per_tokens": self.per_tokens}


@dataclass(frozen=True)
class CostLedger:
    prompt_tokens: int
    completion_tokens: int
    currency: Decimal

    def to_dict(self) -> dict:
        return {
            "prompt_tokens": self.prompt_tokens,
            "completion_tokens": self.completion_tokens,
            "currency": str(self.currency),
        }


def cost_ledger(items: Iterable[JudgeResponse | Usage], prices: PriceTable) -> CostLedger:
    total = Usage()
    for item in items:
        total = total + (item.usage if isinstance(item, JudgeResponse) else item)
    currency = (total.prompt_tokens * prices.prompt + total.completion_tokens * prices.completion) / prices.per_tokens
    return CostLedger(total.prompt_tokens, total.completion_tokens, currency)
