import random
import re
import threading
import time

import pytest

from faithaudit import golden
from faithaudit.judge import JudgeResponse, Role, ScriptedJudge, Usage
from faithaudit.model import CON, ENT, NIC

_WORD = re.compile(r"\w+")


def words(text):
    return set(_WORD.findall(text.lower()))


class RuleJudge:
    """Deterministic stand-in judge for synthetic corpora.

    Claims are the " and "-separated parts of a sentence. A claim is
    ENTAILED when some passage sentence contains all its words, CONTRADICTED
    when it says "never" and a passage sentence shares all its other words,
    BASELESS otherwise. ``jitter`` adds random sleeps to shuffle completion order.
    """

    identity = "rule"

    def __init__(self, jitter=0.0, seed=0):
        self.jitter = jitter
        self._rng = random.Random(seed)
        self._lock = threading.Lock()
        self.calls = []

    def __deepcopy__(self, memo):
        return self

    def submit(self, request):
        if self.jitter:
            with self._lock:
                delay = self._rng.random() * self.jitter
            time.sleep(delay)
        with self._lock:
            self.calls.append(request)
        usage = Usage(len(request.passage.split()), 3)
        if request.role is Role.DECOMPOSE:
            parts = [p.strip(" .") for p in request.passage.split(" and ")]
            return JudgeResponse(Role.DECOMPOSE, claims=tuple(p for p in parts if p), usage=usage,
                                 request_id=request.request_id)
        claim = words(request.claim)
        negated = "never" in claim
        for sentence in re.split(r"(?<=[.!?])\s+", request.passage):
            sw = words(sentence)
            if not negated and claim and claim <= sw:
                return JudgeResponse(request.role, label=ENT, evidence=(sentence,), usage=usage,
                                     request_id=request.request_id)
            if negated and (claim - {"never"}) and (claim - {"never"}) <= sw:
                return JudgeResponse(request.role, label=CON, evidence=(sentence,), usage=usage,
                                     request_id=request.request_id)
        return JudgeResponse(request.role, label=NIC, usage=usage, request_id=request.request_id)


class RecordingJudge:
    """Wraps a judge and records script entries for every call."""

    def __init__(self, inner):
        self.inner = inner
        self.records = {}
        self._lock = threading.Lock()

    def submit(self, request):
        response = self.inner.submit(request)
        rec = {
            "role": request.role.value,
            "claim": request.claim,
            "passage": request.passage,
            "local_label": request.local_label.value if request.local_label else None,
            "response": response.payload(),
        }
        with self._lock:
            self.records[(rec["role"], rec["claim"], rec["passage"], rec["local_label"])] = rec
        return response


FACTS = [
    "The museum opens at 9 am.",
    "Tickets cost 12 dollars.",
    "The library closes on Sundays.",
    "Parking is free for members.",
    "The cafe serves breakfast until noon.",
    "Guided tours start every hour.",
    "Children under five enter free.",
    "The garden has 300 species of roses.",
]


def synthetic_samples(n, seed=0):
    """Small QA samples with known faithful, contradicted and baseless answer sentences."""
    from faithaudit.dataset import GoldSpan, Sample
    from faithaudit.model import CharSpan

    rng = random.Random(seed)
    out = []
    for i in range(n):
        facts = rng.sample(FACTS, 5)
        context = " ".join(facts)
        kind = rng.choice(["faithful", "contradicted", "baseless"])
        first = facts[0].rstrip(".")
        if kind == "faithful":
            answer = f"{first} and {facts[1].rstrip('.').lower()}."
            bad = None
        elif kind == "contradicted":
            w = facts[2].split()
            bad = " ".join(w[:2] + ["never"] + w[2:])
            answer = f"{first}. {bad}"
        else:
            answer = f"{first}. The spa offers massages on weekends."
            bad = "The spa offers"
        spans = ()
        if bad:
            start = answer.index(bad)
            spans = (GoldSpan(CharSpan(start, len(answer)), "Evident Conflict" if kind == "contradicted" else "Evident Baseless Info"),)
        out.append(Sample(id=f"s{i:03d}", task_type="QA", context=context, answer=answer,
                          question="What should visitors know?", gold_hallucinated=bool(bad),
                          gold_answer_spans=spans,
                          gold_refuting_evidence=(facts[2],) if kind == "contradicted" else ()))
    return out


@pytest.fixture
def golden_judge():
    return golden.judge()


@pytest.fixture
def golden_fixture(tmp_path):
    return golden.write_fixture(tmp_path / "fixture")


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.RESULTS:
        terminalreporter.write_line(line)
