from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .metrics import answer_prf
from .validation import check_samples, check_targets
from .verify import AuditResult, PipelineConfig, run_pipeline


class HallucinationAuditor(ClassifierMixin, BaseEstimator):
    """Claim-level faithfulness auditor with a classifier interface.

    ``predict`` returns one boolean per sample (``True`` means the answer
    contains a contradicted or baseless claim); ``audit`` returns the full
    per-sample traces. Nothing is learned: ``fit`` checks the parameters and
    inputs so the auditor can sit in pipelines and grid searches.

    Parameters
    ----------
    judge : object with ``submit(JudgeRequest) -> JudgeResponse``
        Backend used for decomposition and verification.
    window, overlap : int
        Chunk size and overlap, in context sentences.
    mode : {"sentence", "holistic"}
        Claim decomposition mode. Holistic runs produce no answer spans.
    global_verification : bool
        Re-verify every claim against the full context after the chunk pass.
    temperature, seed
        Decoding settings passed to every judge call.
    concurrency : int
        Worker threads for judge fan-out within a sample.

    Examples
    --------
    >>> auditor = HallucinationAuditor(judge=my_judge, window=2, overlap=1)  # doctest: +SKIP
    >>> auditor.fit(X).predict(X)  # doctest: +SKIP
    array([ True, False])
    """

    def __init__(self, judge=None, window=25, overlap=10, mode="sentence", global_verification=True,
                 temperature=0.0, seed=42, concurrency=1):
        self.judge = judge
        self.window = window
        self.overlap = overlap
        self.mode = mode
        self.global_verification = global_verification
        self.temperature = temperature
        self.seed = seed
        self.concurrency = concurrency

    def _config(self) -> PipelineConfig:
        return PipelineConfig(self.window, self.overlap, self.mode, self.global_verification,
                              self.temperature, self.seed, self.concurrency)

    def fit(self, X, y=None):
        self._config().validate()
        if self.judge is None or not hasattr(self.judge, "submit"):
            raise ValueError("judge must provide submit(request)")
        samples = check_samples(X)
        if y is not None:
            check_targets(y, len(samples))
        self.classes_ = np.array([False, True])
        self.config_ = self._config()
        return self

    def audit(self, X) -> list[AuditResult]:
        check_is_fitted(self, "config_")
        return [
            run_pipeline(s.context, s.question, s.answer, self.config_, self.judge, sample_id=s.id)
            for s in check_samples(X)
        ]

    def predict(self, X) -> np.ndarray:
        return np.array([r.answer.hallucinated for r in self.audit(X)], dtype=bool)

    def predict_label(self, X) -> np.ndarray:
        """Answer-level label names (ENTAILED / CONTRADICTED / BASELESS)."""
        return np.array([r.answer.label.value for r in self.audit(X)])

    def score(self, X, y, sample_weight=None) -> float:
        """Answer-level F1 with hallucinated as the positive class."""
        if sample_weight is not None:
            raise ValueError("sample_weight is not supported")
        y = check_targets(y, len(check_samples(X)))
        return answer_prf(list(self.predict(X)), list(y)).f1
