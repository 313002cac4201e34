"""Input coercion for the estimator API."""

from __future__ import annotations

from typing import Any, Iterable

import numpy as np

from .dataset import Sample, _from_native


def check_sample(item: Any, position: int = 0) -> Sample:
    """Accept a :class:`Sample`, a native-format dict, or a ``(context, question, answer)`` triple."""
    if isinstance(item, Sample):
        return item
    if isinstance(item, dict):
        rec = {"id": str(position), **item}
        try:
            return _from_native(rec)
        except KeyError as exc:
            raise ValueError(f"sample {position}: missing field {exc}") from None
    if isinstance(item, (tuple, list)) and len(item) == 3:
        context, question, answer = item
        if not isinstance(context, str) or not isinstance(answer, str):
            raise TypeError(f"sample {position}: context and answer must be strings")
        if question is not None and not isinstance(question, str):
            raise TypeError(f"sample {position}: question must be a string or None")
        return Sample(id=str(position), task_type="QA", context=context, question=question or None, answer=answer)
    raise TypeError(f"sample {position}: expected Sample, dict or (context, question, answer), got {type(item).__name__}")


def check_samples(X: Iterable[Any]) -> list[Sample]:
    if isinstance(X, (str, bytes)):
        raise TypeError("X must be a sequence of samples, not a string")
    samples = [check_sample(item, i) for i, item in enumerate(X)]
    if not samples:
        raise ValueError("X contains no samples")
    return samples


def check_targets(y: Any, n_samples: int) -> np.ndarray:
    y = np.asarray(y)
    if y.ndim != 1 or len(y) != n_samples:
        raise ValueError(f"y must be 1-d with {n_samples} entries, got shape {y.shape}")
    if y.dtype != bool:
        if not np.isin(y, (0, 1)).all():
            raise ValueError("y must hold booleans (True = hallucinated)")
        y = y.astype(bool)
    return y
