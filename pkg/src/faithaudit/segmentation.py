"""Rule-based sentence segmentation with offsets, and sliding-window chunking."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .model import CharSpan

ABBREVIATIONS_VERSION = "1"

# Case-sensitive. A sentence terminator is suppressed when the word it ends is listed here.
DEFAULT_ABBREVIATIONS = frozenset(
    """
    Dr. Mr. Mrs. Ms. Prof. Sr. Jr. St. Mt. Gen. Col. Capt. Lt. Sgt. Rev. Hon.
    e.g. i.e. E.g. I.e. vs. Vs. cf. Cf. al. approx. Approx. ca. viz.
    No. Nos. no. Vol. vol. Fig. fig. Figs. Eq. Eqs. p. pp. Ch. ch. Sec. sec.
    Inc. Ltd. Co. Corp. Bros. Dept. Univ. Est.
    Jan. Feb. Mar. Apr. Jun. Jul. Aug. Sep. Sept. Oct. Nov. Dec.
    Mon. Tue. Tues. Wed. Thu. Thurs. Fri. Sat. Sun.
    """.split()
)

_TERMINATOR = re.compile(r"[.!?]+[\"'”’)\]}]*")
_OPENERS = "\"'“‘([{"


@dataclass(frozen=True)
class Sentence:
    index: int
    span: CharSpan
    text: str


@dataclass(frozen=True)
class Chunk:
    index: int
    first: int
    last: int  # inclusive
    span: CharSpan
    text: str

    @property
    def sentence_indices(self) -> range:
        return range(self.first, self.last + 1)


def load_abbreviations(path: str | Path) -> frozenset[str]:
    """Read an abbreviation list, one entry per line; blank lines and ``#`` comments are skipped."""
    entries = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            entries.append(line)
    return frozenset(entries)


def _is_boundary(line: str, match: re.Match, abbreviations: frozenset[str]) -> bool:
    end = match.end()
    if end < len(line):
        if not line[end].isspace():
            return False
        rest = line[end:].lstrip()
        if rest and not (rest[0].isupper() or rest[0].isdigit()):
            return False
    # the whitespace-delimited word ending at the terminator
    i = match.start()
    while i > 0 and not line[i - 1].isspace():
        i -= 1
    word = line[i:match.start() + 1].lstrip(_OPENERS)
    if line[match.start()] == "." and word in abbreviations:
        return False
    return True


def _split_line(line: str, offset: int, abbreviations: frozenset[str]) -> Iterable[tuple[int, int]]:
    start = 0
    for match in _TERMINATOR.finditer(line):
        if _is_boundary(line, match, abbreviations):
            yield offset + start, offset + match.end()
            start = match.end()
    if start < len(line):
        yield offset + start, offset + len(line)


def segment_sentences(text: str, abbreviations: frozenset[str] | None = None) -> list[Sentence]:
    """Split ``text`` into trimmed sentences carrying their character spans.

    Sentences never cross a newline. Inside a line, a run of ``.!?`` (plus
    closing quotes or brackets) ends a sentence when followed by whitespace and
    an uppercase letter or digit, or by the end of the line, unless the word it
    terminates is a known abbreviation.
    """
    abbreviations = DEFAULT_ABBREVIATIONS if abbreviations is None else abbreviations
    sentences: list[Sentence] = []
    pos = 0
    for line in text.splitlines(keepends=True):
        body = line.rstrip("\r\n")
        for start, end in _split_line(body, pos, abbreviations):
            piece = text[start:end]
            lead = len(piece) - len(piece.lstrip())
            trail = len(piece) - len(piece.rstrip())
            start, end = start + lead, end - trail
            if start < end:
                sentences.append(Sentence(len(sentences), CharSpan(start, end), text[start:end]))
        pos += len(line)
    return sentences


def check_window(window: int, overlap: int) -> None:
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    if not 0 <= overlap < window:
        raise ValueError(f"overlap must satisfy 0 <= overlap < window, got overlap={overlap}, window={window}")


def make_chunks(sentences: Sequence[Sentence], window: int, overlap: int, source: str | None = None) -> list[Chunk]:
    """Slide a window of ``window`` sentences with stride ``window - overlap``.

    The walk stops as soon as a chunk reaches the last sentence, so a trailing
    window contained in its predecessor is never emitted. ``source`` is the
    segmented text; when omitted, chunk text is rebuilt from sentence texts
    joined by single spaces.
    """
    check_window(window, overlap)
    m = len(sentences)
    stride = window - overlap
    chunks: list[Chunk] = []
    start = 0
    while start < m:
        stop = min(start + window, m)
        span = CharSpan(sentences[start].span.start, sentences[stop - 1].span.end)
        if source is not None:
            text = source[span.start:span.end]
        else:
            text = " ".join(s.text for s in sentences[start:stop])
        chunks.append(Chunk(len(chunks), start, stop - 1, span, text))
        if stop == m:
            break
        start += stride
    return chunks
