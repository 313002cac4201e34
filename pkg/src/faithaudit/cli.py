"""Batch command line: ``faithaudit run`` and ``faithaudit evaluate``."""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

from .dataset import FORMATS, DatasetError, load_dataset, read_results, write_results
from .decompose import MODES, SENTENCE
from .evaluation import IdMismatchError, evaluate, match_results
from .judge import PROMPT_VERSION, JudgeError, PriceTable, RemoteJudge, ScriptedJudge, api_key_from_env, cost_ledger
from .report import render_report
from .segmentation import ABBREVIATIONS_VERSION
from .verify import SCHEMA_VERSION, PipelineConfig, run_pipeline

logger = logging.getLogger("faithaudit")

EXIT_OK, EXIT_CONFIG, EXIT_DATASET, EXIT_ALL_FAILED = 0, 2, 3, 4

RESULTS_FILE = "results.jsonl"
SUMMARY_FILE = "summary.json"
REPORT_FILE = "report.html"
LOAD_ERRORS_FILE = "load_errors.jsonl"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    dataset: str
    format: str = "native"
    backend: str | None = None  # None: scripted unless an API key is set
    script: str | None = None
    model: str = "gpt-4o-mini"
    window: int = 25
    overlap: int = 10
    mode: str = SENTENCE
    global_verification: bool = True
    temperature: float = 0.0
    seed: int = 42
    concurrency: int = 1
    out_dir: str = "faithaudit-out"
    price_table: str | None = None

    @property
    def resolved_backend(self) -> str:
        if self.backend:
            return self.backend
        return "remote" if api_key_from_env() else "scripted"

    def pipeline(self) -> PipelineConfig:
        return PipelineConfig(self.window, self.overlap, self.mode, self.global_verification,
                              self.temperature, self.seed, 1)

    def validate(self) -> None:
        try:
            self.pipeline().validate()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.concurrency < 1:
            raise ConfigError("concurrency must be >= 1")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        if self.resolved_backend not in ("scripted", "remote"):
            raise ConfigError(f"unknown backend {self.backend!r}")
        if self.resolved_backend == "scripted" and not self.script:
            raise ConfigError("the scripted backend needs --script")

    def echo(self) -> dict:
        """Settings that determine the output. Concurrency and output location do not."""
        d = asdict(self)
        for key in ("concurrency", "out_dir"):
            d.pop(key)
        d["backend"] = self.resolved_backend
        return d

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.echo(), sort_keys=True).encode()).hexdigest()[:16]


def build_judge(config: RunConfig):
    if config.resolved_backend == "scripted":
        try:
            return ScriptedJudge.from_dir(config.script)
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigError(f"cannot load judge script {config.script}: {exc}") from None
    try:
        return RemoteJudge(config.model, max_concurrency=config.concurrency)
    except JudgeError as exc:
        raise ConfigError(str(exc)) from None


def run_audit(config: RunConfig) -> int:
    """Audit every sample, then write results, summary and report into ``config.out_dir``."""
    try:
        config.validate()
        judge = build_judge(config)
        prices = PriceTable.load(config.price_table) if config.price_table else PriceTable()
    except (ConfigError, OSError, KeyError, ValueError) as exc:
        logger.error("configuration error: %s", exc)
        return EXIT_CONFIG

    try:
        samples = load_dataset(config.dataset, config.format)
    except DatasetError as exc:
        logger.error("dataset error: %s", exc)
        return EXIT_DATASET

    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if samples.errors:
        (out / LOAD_ERRORS_FILE).write_text("".join(json.dumps(e) + "\n" for e in samples.errors), encoding="utf-8")

    pipeline = config.pipeline()

    def audit(sample):
        try:
            return run_pipeline(sample.context, sample.question, sample.answer, pipeline, judge, sample_id=sample.id)
        except Exception as exc:  # one broken sample must not sink the run
            logger.error("sample %s failed: %s", sample.id, exc)
            return exc

    with ThreadPoolExecutor(config.concurrency) as pool:
        outcomes = list(pool.map(audit, samples))

    done = [(s, r) for s, r in zip(samples, outcomes) if not isinstance(r, Exception)]
    failed = [{"id": s.id, "error": f"{type(r).__name__}: {r}"} for s, r in zip(samples, outcomes)
              if isinstance(r, Exception)]
    results = [r for _, r in done]
    write_results(results, out / RESULTS_FILE)

    summary = build_summary(config, judge, samples, done, failed, prices)
    (out / SUMMARY_FILE).write_text(json.dumps(summary, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    (out / REPORT_FILE).write_text(render_report(samples, results, summary), encoding="utf-8")
    if not results:
        logger.error("all %d samples failed", len(samples))
        return EXIT_ALL_FAILED
    return EXIT_OK


def build_summary(config: RunConfig, judge, samples, done, failed, prices: PriceTable) -> dict:
    results = [r for _, r in done]
    flags: Counter = Counter()
    requests: Counter = Counter()
    for r in results:
        flags.update(r.flag_counts)
        requests.update(dict(r.request_counts))
    return {
        "schema_version": SCHEMA_VERSION,
        "config": config.echo(),
        "config_hash": config.digest(),
        "prompt_version": PROMPT_VERSION,
        "abbreviations_version": ABBREVIATIONS_VERSION,
        "judge": getattr(judge, "identity", type(judge).__name__),
        "seed": config.seed,
        "n_samples": len(samples),
        "n_audited": len(results),
        "failed_samples": failed,
        "load_errors": len(samples.errors),
        "metrics": evaluate(done),
        "labels": dict(sorted(Counter(r.answer.label.value for r in results).items())),
        "cost": cost_ledger((r.usage for r in results), prices).to_dict(),
        "prices": prices.to_dict(),
        "request_counts": dict(sorted(requests.items())),
        "flag_counts": dict(sorted(flags.items())),
        "repairs": sum(r.repairs for r in results),
        "rr_violations": sum(len(r.violations) for r in results),
        "degraded_samples": sum(r.degraded for r in results),
        "vacuous_answers": sum(1 for r in results if not r.claims),
    }


def evaluate_only(results_path: str | Path, dataset_path: str | Path, format_tag: str = "native") -> dict:
    """Re-score stored results against a dataset without calling any judge."""
    samples = load_dataset(dataset_path, format_tag)
    results = read_results(results_path)
    return evaluate(match_results(samples, results))


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="faithaudit", description="Audit RAG answers for context faithfulness.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="audit a dataset")
    run.add_argument("--dataset", required=True)
    run.add_argument("--format", default="native", choices=FORMATS)
    run.add_argument("--backend", choices=("scripted", "remote"),
                     help="judge backend (default: remote if an API key is set, else scripted)")
    run.add_argument("--script", help="scripted judge file or directory of *.jsonl script files")
    run.add_argument("--model", default="gpt-4o-mini")
    run.add_argument("--window", type=int, default=25)
    run.add_argument("--overlap", type=int, default=10)
    run.add_argument("--mode", choices=MODES, default=SENTENCE)
    run.add_argument("--no-global", dest="global_verification", action="store_false")
    run.add_argument("--temperature", type=float, default=0.0)
    run.add_argument("--seed", type=int, default=42)
    run.add_argument("--concurrency", type=int, default=1)
    run.add_argument("--out", dest="out_dir", default="faithaudit-out")
    run.add_argument("--price-table", help="JSON: {\"prompt\": .., \"completion\": .., \"per_tokens\": 1000000}")

    ev = sub.add_parser("evaluate", help="re-score stored results")
    ev.add_argument("--results", required=True)
    ev.add_argument("--dataset", required=True)
    ev.add_argument("--format", default="native", choices=FORMATS)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.command == "run":
        opts = vars(args)
        opts.pop("command")
        opts.pop("verbose")
        return run_audit(RunConfig(**opts))
    try:
        metrics = evaluate_only(args.results, args.dataset, args.format)
    except (DatasetError, IdMismatchError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATASET
    print(json.dumps(metrics, indent=2))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
