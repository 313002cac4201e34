"""Versioned prompt templates for the three judge roles.

The wording is owned by this package. Bump ``PROMPT_VERSION`` whenever any
template changes; the version is written into every run summary.
"""

from __future__ import annotations

from .base import JudgeRequest, Role

PROMPT_VERSION = "faithaudit-prompts/1"

LABEL_GUIDE = """Labels:
- ENTAILED: the passage states or directly implies the claim.
- CONTRADICTED: the passage states something incompatible with the claim.
- BASELESS: the passage neither supports nor contradicts the claim.
Judge only against the passage. Ignore anything you know from elsewhere.
Evidence must be copied verbatim from the passage, one string per excerpt.
A BASELESS label must come with an empty evidence list."""

SYSTEM = {
    Role.DECOMPOSE: (
        "You split text into atomic, self-contained factual claims. "
        "Each claim states one proposition, resolves pronouns, and keeps every "
        "qualifier: negation, quantities, temporal markers and modality. "
        "Text with no proposition yields an empty list. "
        'Reply with JSON only: {"claims": ["..."]}.'
    ),
    Role.LOCAL: (
        "You check one claim against one excerpt of a retrieved context.\n"
        + LABEL_GUIDE
        + '\nReply with JSON only: {"label": "...", "evidence": ["..."]}.'
    ),
    Role.GLOBAL: (
        "You check one claim against the complete retrieved context.\n"
        + LABEL_GUIDE
        + "\nRead the whole context and extract the final evidence from it yourself."
        + '\nReply with JSON only: {"label": "...", "evidence": ["..."]}.'
    ),
}

_DECOMPOSE_USER = "Text:\n{passage}"

_LOCAL_USER = "{question_block}Context excerpt:\n{passage}\n\nClaim:\n{claim}"

# local label BASELESS: search from scratch, no location hint
_GLOBAL_SEARCH_USER = (
    "{question_block}Full context:\n{passage}\n\nClaim:\n{claim}\n\n"
    "A chunk-by-chunk screen found no single excerpt that settles this claim. "
    "Its support may be spread over several places in the context. "
    "Search the full context and either confirm BASELESS or revise the label."
)

# local label ENTAILED/CONTRADICTED: pass the focus chunk as a location hint
_GLOBAL_HINT_USER = (
    "{question_block}Full context:\n{passage}\n\nClaim:\n{claim}\n\n"
    "A chunk-by-chunk screen labeled this claim {local_label} based on this excerpt:\n"
    "<<<\n{focus}\n>>>\n"
    "Read the excerpt within the full context. Confirm {local_label} or revise it "
    "if the surrounding text changes its meaning."
)


def render(request: JudgeRequest) -> list[dict]:
    """Build chat messages for ``request``. An absent question is omitted entirely."""
    question_block = f"Question:\n{request.question}\n\n" if request.question else ""
    fields = dict(
        passage=request.passage,
        claim=request.claim,
        question_block=question_block,
        focus=request.focus,
        local_label=request.local_label.value if request.local_label else "",
    )
    if request.role is Role.DECOMPOSE:
        user = _DECOMPOSE_USER.format(**fields)
    elif request.role is Role.LOCAL:
        user = _LOCAL_USER.format(**fields)
    elif request.focus is None:
        user = _GLOBAL_SEARCH_USER.format(**fields)
    else:
        user = _GLOBAL_HINT_USER.format(**fields)
    return [{"role": "system", "content": SYSTEM[request.role]}, {"role": "user", "content": user}]


_STRING_LIST = {"type": "array", "items": {"type": "string"}}

SCHEMAS = {
    Role.DECOMPOSE: {
        "type": "object",
        "properties": {"claims": _STRING_LIST},
        "required": ["claims"],
        "additionalProperties": False,
    },
    Role.LOCAL: {
        "type": "object",
        "properties": {
            "label": {"type": "string", "enum": ["ENTAILED", "CONTRADICTED", "BASELESS"]},
            "evidence": _STRING_LIST,
        },
        "required": ["label", "evidence"],
        "additionalProperties": False,
    },
}
SCHEMAS[Role.GLOBAL] = SCHEMAS[Role.LOCAL]
