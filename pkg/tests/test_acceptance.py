"""Acceptance suite: one test per criterion, each with its own time budget.

Every test records a PASS/FAIL line; the lines are printed at the end of the
session (see ``pytest_terminal_summary`` in conftest.py) and also echoed
immediately when run with ``-s``.
"""

import itertools
import json
import os
import random
import time
from contextlib import contextmanager
from decimal import Decimal
from pathlib import Path

import pytest
from conftest import RecordingJudge, RuleJudge, synthetic_samples

from faithaudit import golden
from faithaudit.cli import RunConfig, run_audit
from faithaudit.dataset import load_dataset, write_samples
from faithaudit.judge import (
    JudgeResponse,
    PriceTable,
    RemoteJudge,
    Role,
    ScriptedJudge,
    Usage,
    cost_ledger,
)
from faithaudit.judge.scripted import request_key
from faithaudit.metrics import SpanEvalInput, evidence_grounding_prf, span_micro_prf
from faithaudit.model import CON, ENT, EXCUSING_FLAGS, NIC, CharSpan, and_join, or_join
from faithaudit.segmentation import Sentence, make_chunks
from faithaudit.verify import PipelineConfig, run_pipeline

RESULTS: list[str] = []


@contextmanager
def criterion(number, title, budget=None):
    start = time.perf_counter()
    try:
        yield
        elapsed = time.perf_counter() - start
        if budget is not None:
            assert elapsed < budget, f"took {elapsed:.2f}s, budget {budget}s"
    except BaseException as exc:
        line = f"FAIL  AC{number} {title} ({time.perf_counter() - start:.2f}s): {type(exc).__name__}"
        RESULTS.append(line)
        print(line)
        raise
    line = f"PASS  AC{number} {title} ({elapsed:.2f}s)"
    RESULTS.append(line)
    print(line)


# 1. join algebra

LABELS = (ENT, CON, NIC)


def priority_interpreter(labels, order):
    present = set(labels)
    return next(label for label in order if label in present)


def test_ac1_join_algebra():
    with criterion(1, "join truth tables", budget=1.0):
        checked = 0
        for n in range(1, 5):
            for ms in itertools.combinations_with_replacement(LABELS, n):
                for perm in set(itertools.permutations(ms)):
                    assert or_join(perm) is priority_interpreter(perm, (CON, ENT, NIC))
                    assert and_join(perm) is priority_interpreter(perm, (CON, NIC, ENT))
                    checked += 1
        assert checked == 3 + 9 + 27 + 81
        # chunk rows and the answer row of the running example
        assert or_join([CON, CON, NIC]) is CON
        assert or_join([NIC, ENT, ENT]) is ENT
        assert or_join([NIC, NIC, NIC]) is NIC
        assert and_join([CON, CON, ENT, ENT, NIC]) is CON


# 2. golden trace

EXPECTED_CHUNKS = (
    (CON, CON, NIC),
    (CON, CON, NIC),
    (NIC, ENT, ENT),
    (NIC, NIC, NIC),
    (NIC, NIC, NIC),
)
EXPECTED_LOCAL = (CON, CON, ENT, NIC, NIC)
EXPECTED_FINAL = (CON, CON, ENT, ENT, NIC)


def test_ac2_golden_trace():
    with criterion(2, "golden trace", budget=1.0):
        judge = golden.judge()
        on = PipelineConfig(window=2, overlap=1)
        result = run_pipeline(golden.CONTEXT, golden.QUESTION, golden.ANSWER, on, judge, golden.SAMPLE_ID)
        assert [c.text for c in result.claims] == list(golden.CLAIMS)
        assert tuple(tuple(lab for _, lab in v.chunk_assessments) for v in result.verdicts) == EXPECTED_CHUNKS
        assert tuple(v.local_label for v in result.verdicts) == EXPECTED_LOCAL
        assert tuple(v.final_label for v in result.verdicts) == EXPECTED_FINAL
        assert result.answer.label is CON and result.answer.hallucinated
        clm4 = result.verdicts[3]
        assert (clm4.local_label, clm4.final_label) == (NIC, ENT)

        off = PipelineConfig(window=2, overlap=1, global_verification=False)
        local_only = run_pipeline(golden.CONTEXT, golden.QUESTION, golden.ANSWER, off, judge, golden.SAMPLE_ID)
        assert local_only.verdicts[3].final_label is NIC
        assert tuple(v.final_label for v in local_only.verdicts) == EXPECTED_LOCAL
        assert local_only.answer.label is CON


# 3. chunking properties


def _sentences(m):
    out, pos = [], 0
    for i in range(m):
        out.append(Sentence(i, CharSpan(pos, pos + 2), f"s{i}"))
        pos += 3
    return out


def test_ac3_chunking_grid():
    with criterion(3, "chunking grid", budget=5.0):
        pools = [_sentences(m) for m in range(61)]
        configs = 0
        for window in range(1, 41):
            for overlap in range(window):
                for m in range(61):
                    ranges = [(c.first, c.last) for c in make_chunks(pools[m], window, overlap)]
                    configs += 1
                    if m == 0:
                        assert ranges == []
                        continue
                    covered = set()
                    for first, last in ranges:
                        assert last - first + 1 <= window
                        covered.update(range(first, last + 1))
                    assert covered == set(range(m))
                    if overlap >= 1 and window >= 2:
                        for i in range(m - 1):
                            assert any(first <= i and i + 1 <= last for first, last in ranges), (m, window, overlap, i)
        assert configs == 61 * sum(range(1, 41))
        assert [(c.first, c.last) for c in make_chunks(pools[60], 25, 10)] == [(0, 24), (15, 39), (30, 54), (45, 59)]
        assert [(c.first, c.last) for c in make_chunks(pools[4], 2, 1)] == [(0, 1), (1, 2), (2, 3)]


# 4. metric oracle equivalence


def brute(samples):
    tp = fp = fn = 0
    for s in samples:
        gold = [False] * s.text_length
        pred = [False] * s.text_length
        for sp in s.gold_spans:
            gold[sp.start:sp.end] = [True] * (sp.end - sp.start)
        for sp in s.pred_spans:
            pred[sp.start:sp.end] = [True] * (sp.end - sp.start)
        tp += sum(g and p for g, p in zip(gold, pred))
        fp += sum(p and not g for g, p in zip(gold, pred))
        fn += sum(g and not p for g, p in zip(gold, pred))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return tp, fp, fn, precision, recall, f1


def random_spans(rng, n):
    spans = []
    for _ in range(rng.randint(0, 5)):
        a, b = rng.randint(0, n), rng.randint(0, n)
        spans.append(CharSpan(min(a, b), max(a, b)))
    return spans


def test_ac4_metric_oracle():
    with criterion(4, "metric oracle equivalence", budget=10.0):
        worked = span_micro_prf([SpanEvalInput([CharSpan(0, 10)], [CharSpan(5, 15)], 20)])
        assert (worked.tp, worked.fp, worked.fn) == (5, 5, 5)
        assert worked.precision == worked.recall == worked.f1 == 0.5

        rng = random.Random(20240601)
        for _ in range(1200):
            batch = []
            for _ in range(rng.randint(1, 4)):
                n = rng.randint(0, 80)
                batch.append(SpanEvalInput(random_spans(rng, n), random_spans(rng, n), n))
            expected = brute(batch)
            for fn in (span_micro_prf, evidence_grounding_prf):
                got = fn(batch)
                assert (got.tp, got.fp, got.fn) == expected[:3]
                for value, want in zip((got.precision, got.recall, got.f1), expected[3:]):
                    assert abs(value - want) <= 1e-12


# 5. trace-consistency enforcement

FUZZ_FACTS = [
    "The museum opens at 9 am.",
    "Tickets cost 12 dollars for adults.",
    "The library closes on Sundays.",
    "Parking is free for members.",
    "The cafe serves breakfast until noon.",
    "Guided tours start every hour.",
]


class AdversarialScript(ScriptedJudge):
    """A scripted judge whose documents are drawn at random the first time a key is seen.

    The documents cover the failure shapes a real judge produces: BASELESS
    with evidence, verdicts without evidence, evidence that is not in the
    context at all, near-miss evidence, and malformed JSON.
    """

    def __init__(self, rng, context):
        super().__init__()
        self.rng = rng
        self.context = context

    def _evidence(self):
        rng, ctx = self.rng, self.context
        kind = rng.choice(["exact", "substring", "mangled", "junk", "shuffled"])
        if kind == "exact" or not ctx:
            return rng.choice(FUZZ_FACTS)
        if kind == "substring":
            i = rng.randrange(len(ctx))
            return ctx[i:i + rng.randint(1, 40)]
        if kind == "mangled":
            return "  ".join(rng.choice(FUZZ_FACTS).upper().split())
        if kind == "junk":
            return rng.choice(["zebra unicorn", "The moon is made of cheese.", "", "   "])
        words = rng.choice(FUZZ_FACTS).split()
        rng.shuffle(words)
        return " ".join(words)

    def _document(self, role):
        rng = self.rng
        if rng.random() < 0.08:
            return rng.choice(['{"label": "MAYBE", "evidence": []}', "not json", '{"label": "ENTAILED"}', "[]"])
        if role is Role.DECOMPOSE:
            return {"claims": [f"claim {rng.randint(0, 3)}" for _ in range(rng.randint(0, 3))]}
        label = rng.choice([ENT, CON, NIC])
        evidence = [self._evidence() for _ in range(rng.choice([0, 0, 1, 2]))]
        return {"label": label.value, "evidence": evidence}

    def submit(self, request):
        if request_key(request) not in self.entries:
            self.add(request.role, request.claim, request.passage, self._document(request.role), request.local_label)
        return super().submit(request)


def test_ac5_rr_enforcement_fuzz():
    with criterion(5, "rr enforcement fuzz (500 cases)", budget=30.0):
        rng = random.Random(7)
        verdicts = unflagged = flagged = 0
        for case in range(500):
            context = " ".join(rng.sample(FUZZ_FACTS, rng.randint(0, 5)))
            answer = " ".join(f"Sentence {i} about things." for i in range(rng.randint(1, 3)))
            window = rng.randint(1, 4)
            config = PipelineConfig(window=window, overlap=rng.randint(0, window - 1),
                                    global_verification=rng.random() < 0.8)
            result = run_pipeline(context, None, answer, config, AdversarialScript(rng, context), f"fuzz{case}")
            bad_ids = {v.claim_id for v in result.violations}
            for v in result.verdicts:
                verdicts += 1
                if v.claim_id in bad_ids:
                    flagged += 1
                    if not v.flags & EXCUSING_FLAGS:
                        unflagged += 1
        assert verdicts > 500 and flagged > 0
        assert unflagged == 0


# 6. determinism


def _write_determinism_fixture(directory: Path):
    samples = synthetic_samples(24, seed=11)
    recorder = RecordingJudge(RuleJudge())
    config = PipelineConfig(window=2, overlap=1)
    for s in samples:
        run_pipeline(s.context, s.question, s.answer, config, recorder, s.id)
    directory.mkdir(parents=True, exist_ok=True)
    data = directory / "dataset.jsonl"
    write_samples(samples, data)
    ScriptedJudge.write_script(directory / "script.jsonl", list(recorder.records.values()))
    return data, directory / "script.jsonl"


def test_ac6_determinism(tmp_path):
    with criterion(6, "determinism across runs and concurrency bounds", budget=30.0):
        data, script = _write_determinism_fixture(tmp_path / "fixture")
        outputs = []
        for run, concurrency in enumerate((1, 8, 1, 8)):
            out = tmp_path / f"run{run}"
            config = RunConfig(str(data), backend="scripted", script=str(script), window=2, overlap=1,
                               concurrency=concurrency, out_dir=str(out))
            assert run_audit(config) == 0
            outputs.append(tuple((out / name).read_bytes() for name in ("results.jsonl", "summary.json")))
        assert all(o == outputs[0] for o in outputs)
        summary = json.loads(outputs[0][1])
        assert summary["n_audited"] == 24 and summary["degraded_samples"] == 0


# 7. cost accounting


def test_ac7_cost_and_request_counts(tmp_path):
    with criterion(7, "cost ledger and request-count identity"):
        prices = PriceTable(Decimal("0.15"), Decimal("0.60"), 1_000_000)
        usages = [(1200, 300), (800, 150), (0, 0), (2500, 1000), (1, 1)]
        stream = [JudgeResponse(Role.LOCAL, label=NIC, usage=Usage(p, c)) for p, c in usages]
        ledger = cost_ledger(stream, prices)
        # 4501 prompt tokens and 1451 completion tokens:
        # 4501 * 0.15 / 1e6 + 1451 * 0.60 / 1e6 = 0.00067515 + 0.0008706
        assert (ledger.prompt_tokens, ledger.completion_tokens) == (4501, 1451)
        assert ledger.currency == Decimal("0.00154575")

        data, script = golden.write_fixture(tmp_path / "fixture")
        out = tmp_path / "out"
        cfg = RunConfig(str(data), backend="scripted", script=str(script), window=2, overlap=1, out_dir=str(out))
        assert run_audit(cfg) == 0
        record = json.loads((out / "results.jsonl").read_text())
        claims, chunks = len(record["claims"]), len(record["chunks"])
        assert (claims, chunks) == (5, 3)
        assert record["request_counts"]["LOCAL"] == claims * chunks
        assert record["request_counts"]["GLOBAL"] == claims
        summary = json.loads((out / "summary.json").read_text())
        usage = record["usage"]
        assert summary["cost"]["prompt_tokens"] == usage["prompt_tokens"]
        assert summary["cost"]["completion_tokens"] == usage["completion_tokens"]


# 8. online smoke


@pytest.mark.online
@pytest.mark.skipif(not (os.environ.get("FAITHAUDIT_API_KEY") and os.environ.get("FAITHAUDIT_SMOKE_DATASET")),
                    reason="needs FAITHAUDIT_API_KEY and FAITHAUDIT_SMOKE_DATASET")
def test_ac8_online_smoke(tmp_path):
    with criterion(8, "online integration smoke"):
        fmt = os.environ.get("FAITHAUDIT_SMOKE_FORMAT", "ragtruth-plus")
        samples = list(load_dataset(os.environ["FAITHAUDIT_SMOKE_DATASET"], fmt))[:10]
        data = tmp_path / "slice.jsonl"
        write_samples(samples, data)
        model = os.environ.get("FAITHAUDIT_SMOKE_MODEL", "gpt-4o-mini")
        RemoteJudge(model)  # fails fast on a missing key
        out = tmp_path / "out"
        cfg = RunConfig(str(data), backend="remote", model=model, concurrency=4, out_dir=str(out))
        assert run_audit(cfg) == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["n_audited"] == len(samples) and not summary["failed_samples"]
        assert summary["metrics"]["answer"]["n"] == len(samples)
        assert sum(summary["labels"].values()) == len(samples)
