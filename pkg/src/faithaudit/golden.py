"""A worked five-claim example with a complete judge script.

Four context sentences, three answer sentences, five claims. Under
``window=2, overlap=1`` the context splits into three chunks and the script
produces: claims 1-2 contradicted, claim 3 entailed, claim 4 baseless in
every chunk but entailed once the full context is read (its support sits in
the first and last sentences, which never share a chunk), claim 5 baseless
throughout. The answer as a whole is CONTRADICTED.
"""

from __future__ import annotations

from pathlib import Path

from .dataset import GoldSpan, Sample, write_samples
from .judge import Role, ScriptedJudge
from .model import CON, ENT, NIC, CharSpan, Label
from .segmentation import make_chunks, segment_sentences

SAMPLE_ID = "trial-policy"
WINDOW, OVERLAP = 2, 1

CONTEXT_SENTENCES = (
    "New users who complete identity verification qualify for a one-time extension of their free trial.",
    "This policy applies only to verified accounts, and verification is mandatory for every user.",
    "The free trial lasts 14 days.",
    "Each trial extension adds exactly 7 days.",
)
CONTEXT = " ".join(CONTEXT_SENTENCES)
QUESTION = "How long is the free trial, and who can use it?"

ANSWER_SENTENCES = (
    "The policy applies to all users, so no verification is required.",
    "The free trial lasts 14 days, and verified new users can get a one-time 7-day extension.",
    "The trial also includes priority email support.",
)
ANSWER = " ".join(ANSWER_SENTENCES)

CLAIMS = (
    "the policy applies to all users",
    "verification is not required",
    "the free trial lasts 14 days",
    "verified new users can receive a one-time 7-day extension of the free trial",
    "the trial includes priority email support",
)
CLAIMS_BY_SENTENCE = ((CLAIMS[0], CLAIMS[1]), (CLAIMS[2], CLAIMS[3]), (CLAIMS[4],))

_S0, _S1, _S2, _S3 = CONTEXT_SENTENCES
_POLICY = "This policy applies only to verified accounts"
_MANDATORY = "verification is mandatory for every user"

# per claim: chunk labels with provisional evidence
LOCAL = {
    CLAIMS[0]: ((CON, [_POLICY]), (CON, [_POLICY]), (NIC, [])),
    CLAIMS[1]: ((CON, [_MANDATORY]), (CON, [_MANDATORY]), (NIC, [])),
    CLAIMS[2]: ((NIC, []), (ENT, [_S2]), (ENT, [_S2])),
    CLAIMS[3]: ((NIC, []), (NIC, []), (NIC, [])),
    CLAIMS[4]: ((NIC, []), (NIC, []), (NIC, [])),
}

# per claim: (local label, final label, evidence)
GLOBAL = {
    CLAIMS[0]: (CON, CON, [_POLICY]),
    CLAIMS[1]: (CON, CON, [_MANDATORY]),
    CLAIMS[2]: (ENT, ENT, [_S2]),
    CLAIMS[3]: (NIC, ENT, [_S0, _S3]),
    CLAIMS[4]: (NIC, NIC, []),
}

EXPECTED_LOCAL = (CON, CON, ENT, NIC, NIC)
EXPECTED_FINAL = (CON, CON, ENT, ENT, NIC)
EXPECTED_ANSWER = CON


def _doc(label: Label, evidence: list[str]) -> dict:
    return {"label": label.value, "evidence": list(evidence)}


def script_records() -> list[dict]:
    chunks = make_chunks(segment_sentences(CONTEXT), WINDOW, OVERLAP, CONTEXT)
    records = []
    for sentence, claims in zip(ANSWER_SENTENCES, CLAIMS_BY_SENTENCE):
        records.append({"role": Role.DECOMPOSE.value, "claim": None, "passage": sentence,
                        "local_label": None, "response": {"claims": list(claims)}})
    for claim, per_chunk in LOCAL.items():
        for chunk, (label, evidence) in zip(chunks, per_chunk):
            records.append({"role": Role.LOCAL.value, "claim": claim, "passage": chunk.text,
                            "local_label": None, "response": _doc(label, evidence)})
    for claim, (local, final, evidence) in GLOBAL.items():
        records.append({"role": Role.GLOBAL.value, "claim": claim, "passage": CONTEXT,
                        "local_label": local.value, "response": _doc(final, evidence)})
    return records


def judge() -> ScriptedJudge:
    j = ScriptedJudge()
    for rec in script_records():
        j.add(rec["role"], rec["claim"], rec["passage"], rec["response"], rec["local_label"])
    return j


def _answer_span(i: int) -> CharSpan:
    start = ANSWER.index(ANSWER_SENTENCES[i])
    return CharSpan(start, start + len(ANSWER_SENTENCES[i]))


def sample() -> Sample:
    return Sample(
        id=SAMPLE_ID,
        task_type="QA",
        context=CONTEXT,
        question=QUESTION,
        answer=ANSWER,
        gold_hallucinated=True,
        gold_answer_spans=(GoldSpan(_answer_span(0), "Evident Conflict"), GoldSpan(_answer_span(2), "Evident Baseless Info")),
        gold_refuting_evidence=(_S1,),
    )


def write_fixture(directory: str | Path) -> tuple[Path, Path]:
    """Write ``dataset.jsonl`` and ``script.jsonl`` for the CLI; returns both paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    data, script = directory / "dataset.jsonl", directory / "script.jsonl"
    write_samples([sample()], data)
    ScriptedJudge.write_script(script, script_records())
    return data, script
