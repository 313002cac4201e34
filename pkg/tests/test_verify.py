import random
from concurrent.futures import ThreadPoolExecutor

import pytest
from conftest import RuleJudge, synthetic_samples

from faithaudit import golden
from faithaudit.judge import JudgeError, JudgeResponse, Role
from faithaudit.model import CON, DEGRADED, ENT, FALLBACK, NIC, UNGROUNDED, Claim
from faithaudit.segmentation import make_chunks, segment_sentences
from faithaudit.verify import (
    AuditResult,
    PipelineConfig,
    run_pipeline,
    verify_global,
    verify_local,
)

GOLDEN = PipelineConfig(window=golden.WINDOW, overlap=golden.OVERLAP)


def golden_setup():
    sentences = segment_sentences(golden.CONTEXT)
    chunks = make_chunks(sentences, golden.WINDOW, golden.OVERLAP, golden.CONTEXT)
    claims = [Claim(i + 1, text) for i, text in enumerate(golden.CLAIMS)]
    return sentences, chunks, claims


class FailingJudge:
    """Delegates to ``inner`` but raises JudgeError on matching requests."""

    def __init__(self, inner, predicate):
        self.inner, self.predicate = inner, predicate

    def submit(self, request):
        if self.predicate(request):
            raise JudgeError("simulated outage")
        return self.inner.submit(request)


@pytest.mark.parametrize(
    "claim_index, label, focus, assessments",
    [
        (0, CON, 0, (CON, CON, NIC)),
        (2, ENT, 1, (NIC, ENT, ENT)),
        (4, NIC, None, (NIC, NIC, NIC)),
    ],
)
def test_verify_local_running_example(golden_judge, claim_index, label, focus, assessments):
    _, chunks, claims = golden_setup()
    local = verify_local(claims[claim_index], chunks, golden.QUESTION, golden_judge)
    assert local.local_label is label and local.focus_chunk == focus
    assert tuple(lab for _, lab in local.assessments) == assessments


def test_verify_global_moves_baseless_to_entailed(golden_judge):
    sentences, chunks, claims = golden_setup()
    local = verify_local(claims[3], chunks, golden.QUESTION, golden_judge)
    assert local.local_label is NIC
    verdict, response = verify_global(claims[3], golden.CONTEXT, sentences, chunks, golden.QUESTION, local,
                                      golden_judge)
    assert verdict.local_label is NIC and verdict.final_label is ENT
    assert verdict.focus_chunk is None and response is not None
    assert {e.sentence_indices for e in verdict.evidence} == {(0,), (3,)}
    for e in verdict.evidence:
        assert golden.CONTEXT[e.span.start:e.span.end] == e.text
    assert not verdict.flags


def test_verify_global_failure_falls_back(golden_judge):
    sentences, chunks, claims = golden_setup()
    local = verify_local(claims[0], chunks, None, golden_judge)
    broken = FailingJudge(golden_judge, lambda r: True)
    verdict, response = verify_global(claims[0], golden.CONTEXT, sentences, chunks, None, local, broken)
    assert response is None and verdict.final_label is CON
    assert {FALLBACK, DEGRADED} <= verdict.flags and verdict.evidence == ()


def test_running_example_trace(golden_judge):
    result = run_pipeline(golden.CONTEXT, golden.QUESTION, golden.ANSWER, GOLDEN, golden_judge)
    assert [c.text for c in result.claims] == list(golden.CLAIMS)
    assert [c.source_sentence_index for c in result.claims] == [0, 0, 1, 1, 2]
    assert tuple(v.local_label for v in result.verdicts) == golden.EXPECTED_LOCAL
    assert tuple(v.final_label for v in result.verdicts) == golden.EXPECTED_FINAL
    assert result.answer.label is golden.EXPECTED_ANSWER and result.answer.hallucinated
    assert result.chunks == ((0, 1), (1, 2), (2, 3))
    assert result.violations == () and not result.degraded
    counts = dict(result.request_counts)
    assert counts == {"DECOMPOSE": 3, "LOCAL": 15, "GLOBAL": 5}


def test_running_example_without_global(golden_judge):
    config = PipelineConfig(window=golden.WINDOW, overlap=golden.OVERLAP, global_verification=False)
    result = run_pipeline(golden.CONTEXT, golden.QUESTION, golden.ANSWER, config, golden_judge)
    assert tuple(v.final_label for v in result.verdicts) == golden.EXPECTED_LOCAL
    assert result.answer.label is CON
    assert dict(result.request_counts)["GLOBAL"] == 0
    assert result.violations == ()


def test_empty_answer_is_vacuously_entailed(golden_judge):
    result = run_pipeline(golden.CONTEXT, None, "   ", GOLDEN, golden_judge)
    assert result.claims == () and result.answer.label is ENT and not result.answer.hallucinated
    assert result.warnings and sum(dict(result.request_counts).values()) == 0


def test_empty_context_makes_everything_baseless():
    judge = RuleJudge()
    result = run_pipeline("", None, "Tickets cost 12 dollars and parking is free.", PipelineConfig(), judge)
    assert len(result.claims) == 2
    assert all(v.final_label is NIC for v in result.verdicts)
    assert [r.role for r in judge.calls] == [Role.DECOMPOSE]
    assert result.answer.label is NIC


def test_failed_chunk_marks_degraded(golden_judge):
    chunk1 = " ".join(golden.CONTEXT_SENTENCES[1:3])
    broken = FailingJudge(golden_judge, lambda r: r.role is Role.LOCAL and r.passage == chunk1)
    result = run_pipeline(golden.CONTEXT, golden.QUESTION, golden.ANSWER, GOLDEN, broken)
    assert result.degraded
    assert all(DEGRADED in v.flags for v in result.verdicts)
    assert {"stage": "local", "claim_id": 3, "chunk_index": 1} in result.errors
    # chunk 2 still supports the trial-length claim, so its focus moves there
    assert result.verdicts[2].local_label is ENT and result.verdicts[2].focus_chunk == 2
    assert tuple(v.final_label for v in result.verdicts) == golden.EXPECTED_FINAL


def test_ungroundable_evidence_is_flagged():
    judge = RuleJudge()
    context = "Tickets cost 12 dollars."
    original = judge.submit

    def submit(request):
        r = original(request)
        if request.role is Role.GLOBAL:
            return JudgeResponse(Role.GLOBAL, label=ENT, evidence=("Nothing like this appears.",),
                                 request_id=request.request_id)
        return r

    judge.submit = submit
    result = run_pipeline(context, None, "Tickets cost 12 dollars.", PipelineConfig(), judge)
    v = result.verdicts[0]
    assert UNGROUNDED in v.flags and v.ungrounded_evidence == ("Nothing like this appears.",)
    # ENTAILED with nothing grounded also breaks the evidence requirement
    assert [x.clause for x in result.violations] == ["b", "c"]


@pytest.mark.parametrize("window, overlap", [(2, 1), (3, 0), (25, 10)])
def test_request_count_identity(window, overlap):
    for sample in synthetic_samples(10, seed=window):
        judge = RuleJudge()
        config = PipelineConfig(window=window, overlap=overlap)
        result = run_pipeline(sample.context, sample.question, sample.answer, config, judge)
        counts = dict(result.request_counts)
        assert counts["LOCAL"] == len(result.claims) * len(result.chunks)
        assert counts["GLOBAL"] == len(result.claims)
        assert sum(counts.values()) == len(judge.calls)


def test_result_round_trip(golden_judge):
    result = run_pipeline(golden.CONTEXT, golden.QUESTION, golden.ANSWER, GOLDEN, golden_judge)
    assert AuditResult.from_dict(result.to_dict()) == result


def test_completion_order_does_not_matter():
    samples = synthetic_samples(6, seed=3)
    config = PipelineConfig(window=2, overlap=1)
    baseline = [run_pipeline(s.context, s.question, s.answer, config, RuleJudge(), s.id).to_dict() for s in samples]
    for seed in range(3):
        with ThreadPoolExecutor(8) as pool:
            judge = RuleJudge(jitter=0.003, seed=seed)
            shuffled = [run_pipeline(s.context, s.question, s.answer, config, judge, s.id, executor=pool).to_dict()
                        for s in random.Random(seed).sample(samples, len(samples))]
        assert sorted(shuffled, key=lambda d: d["sample_id"]) == baseline


def test_config_validation():
    with pytest.raises(ValueError):
        PipelineConfig(window=5, overlap=5).validate()
    with pytest.raises(ValueError):
        PipelineConfig(mode="paragraph").validate()
