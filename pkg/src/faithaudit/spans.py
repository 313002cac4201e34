"""Interval helpers over half-open character spans."""

from __future__ import annotations

from typing import Iterable

from .model import CharSpan


def merge(spans: Iterable[CharSpan]) -> list[CharSpan]:
    """Sorted, disjoint union. Touching spans are merged; empty spans vanish."""
    out: list[CharSpan] = []
    for span in sorted(s for s in spans if not s.empty):
        if out and span.start <= out[-1].end:
            if span.end > out[-1].end:
                out[-1] = CharSpan(out[-1].start, span.end)
        else:
            out.append(span)
    return out


def total_length(merged: Iterable[CharSpan]) -> int:
    return sum(len(s) for s in merged)


def intersection_length(a: list[CharSpan], b: list[CharSpan]) -> int:
    """Overlap size of two merged span lists (two-pointer sweep)."""
    i = j = 0
    n = 0
    while i < len(a) and j < len(b):
        lo = max(a[i].start, b[j].start)
        hi = min(a[i].end, b[j].end)
        if lo < hi:
            n += hi - lo
        if a[i].end <= b[j].end:
            i += 1
        else:
            j += 1
    return n
