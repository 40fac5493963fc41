"""Ranking and classification metrics on +/-1 labels.

Ranking ties break deterministically: descending score, then ascending
index.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, NoPositivesError


def f1_score(predicted: np.ndarray, actual: np.ndarray) -> float:
    """Harmonic mean of precision and recall on the +1 class; 0 when both
    vanish."""
    predicted = np.asarray(predicted)
    actual = np.asarray(actual)
    if predicted.shape != actual.shape:
        raise DimensionError(f"shape mismatch {predicted.shape} vs {actual.shape}")
    tp = int(np.sum((predicted == 1) & (actual == 1)))
    fp = int(np.sum((predicted == 1) & (actual == -1)))
    fn = int(np.sum((predicted == -1) & (actual == 1)))
    if tp == 0:
        return 0.0
    precision = tp / (tp + fp)
    recall = tp / (tp + fn)
    return 2.0 * precision * recall / (precision + recall)


def ranking_order(scores: np.ndarray) -> np.ndarray:
    """Indices sorted by descending score, ties by ascending index."""
    scores = np.asarray(scores)
    return np.argsort(-scores, kind="stable")


def average_precision(scores: np.ndarray, actual: np.ndarray) -> float:
    """Area under the precision-recall curve of the induced ranking:
    sum over positives of precision-at-rank times the recall increment."""
    scores = np.asarray(scores, dtype=np.float64)
    actual = np.asarray(actual)
    if scores.shape != actual.shape:
        raise DimensionError(f"shape mismatch {scores.shape} vs {actual.shape}")
    total_pos = int(np.sum(actual == 1))
    if total_pos == 0:
        raise NoPositivesError("average precision needs at least one positive")
    order = ranking_order(scores)
    hits = (actual[order] == 1).astype(np.float64)
    cum_hits = np.cumsum(hits)
    ranks = np.arange(1, len(scores) + 1, dtype=np.float64)
    precision_at = cum_hits / ranks
    return float(np.sum(precision_at * hits) / total_pos)
