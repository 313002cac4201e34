"""Static HTML report: answers with label-colored spans and per-claim tables."""

from __future__ import annotations

import html
from typing import Sequence

from .dataset import Sample
from .model import CON, ENT, NIC, Label
from .verify import AuditResult

COLORS = {CON: "#f8c4c4", ENT: "#c8ecc8", NIC: "#f6eaa0"}

_STYLE = """
body { font-family: sans-serif; max-width: 70em; margin: 2em auto; }
table { border-collapse: collapse; margin: 0.5em 0 1.5em; }
td, th { border: 1px solid #bbb; padding: 0.25em 0.5em; vertical-align: top; font-size: 90%; }
.answer { line-height: 1.6; padding: 0.5em; border: 1px solid #ddd; }
.flag { color: #a33; font-size: 85%; }
""" + "".join(f".{lab.short} {{ background: {color}; }}\n" for lab, color in COLORS.items())


def _badge(label: Label) -> str:
    return f'<span class="{label.short}">{label.value}</span>'


def _colored_answer(answer: str, result: AuditResult) -> str:
    if result.answer_spans is None:
        return html.escape(answer)
    parts, current, buf = [], None, []
    for i, ch in enumerate(answer):
        label = result.answer_spans.label_at(i)
        if label is not current:
            parts.append((current, "".join(buf)))
            current, buf = label, []
        buf.append(ch)
    parts.append((current, "".join(buf)))
    return "".join(
        f'<span class="{lab.short}">{html.escape(text)}</span>' if lab else html.escape(text)
        for lab, text in parts if text
    )


def render_report(samples: Sequence[Sample], results: Sequence[AuditResult], summary: dict) -> str:
    by_id = {s.id: s for s in samples}
    out = [
        "<!DOCTYPE html><html><head><meta charset='utf-8'><title>faithaudit report</title>",
        f"<style>{_STYLE}</style></head><body>",
        "<h1>Faithfulness audit</h1>",
        f"<p>judge: {html.escape(str(summary.get('judge')))} &middot; prompts: "
        f"{html.escape(str(summary.get('prompt_version')))} &middot; samples: {len(results)}</p>",
        "<h2>Metrics</h2><table><tr><th>family</th><th>P</th><th>R</th><th>F1</th><th>n</th></tr>",
    ]
    for name, m in (summary.get("metrics") or {}).items():
        if m is None:
            out.append(f"<tr><td>{name}</td><td colspan='4'>n/a</td></tr>")
        else:
            out.append(f"<tr><td>{name}</td><td>{m['precision']:.3f}</td><td>{m['recall']:.3f}</td>"
                       f"<td>{m['f1']:.3f}</td><td>{m['n']}</td></tr>")
    out.append("</table>")
    for result in results:
        sample = by_id.get(result.sample_id)
        out.append(f"<h2>{html.escape(result.sample_id)} {_badge(result.answer.label)}</h2>")
        if sample is not None:
            if sample.question:
                out.append(f"<p><b>Question:</b> {html.escape(sample.question)}</p>")
            out.append(f"<div class='answer'>{_colored_answer(sample.answer, result)}</div>")
        out.append("<table><tr><th>#</th><th>claim</th><th>chunks</th><th>local</th><th>final</th>"
                   "<th>evidence</th><th>flags</th></tr>")
        claims = {c.id: c for c in result.claims}
        for v in result.verdicts:
            chunks = " ".join(lab.short for _, lab in v.chunk_assessments)
            evidence = "<br>".join(html.escape(e.text) for e in v.evidence)
            out.append(
                f"<tr><td>{v.claim_id}</td><td>{html.escape(claims[v.claim_id].text)}</td><td>{chunks}</td>"
                f"<td>{_badge(v.local_label)}</td><td>{_badge(v.final_label)}</td><td>{evidence}</td>"
                f"<td class='flag'>{' '.join(sorted(v.flags))}</td></tr>"
            )
        out.append("</table>")
        if result.violations:
            out.append("<ul class='flag'>" + "".join(
                f"<li>claim {v.claim_id} clause {v.clause}: {html.escape(v.detail)}</li>" for v in result.violations
            ) + "</ul>")
    out.append("</body></html>")
    return "\n".join(out) + "\n"
