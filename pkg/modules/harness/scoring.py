"""RMS errors, Youden thresholds and word/sentence scoring rules."""
import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np
from sklearn.metrics import roc_curve

from utils import ValidationError, warn
from modules.metric import SigmoidFit, sigmoid_map

WORD_PAD = 0.050  # seconds added to each side of a word span


def _group_rows(table) -> dict:
    groups = defaultdict(list)
    for row in table:
        groups[(row["listener_id"], row["condition"], row.get("snr"))].append(row)
    return groups


def _scored(table) -> list:
    rows = [r for r in table if r.get("I_subj") is not None and r.get("I_pred") is not None]
    if not rows:
        raise ValidationError("no rows carry both predicted and subjective scores")
    return rows


def rmse_individual(table) -> float:
    """RMS of I_pred - I_subj within each (listener, condition, snr) group, averaged over groups."""
    groups = _group_rows(_scored(table))
    per_group = []
    for key in sorted(groups, key=str):
        err = np.array([r["I_pred"] - r["I_subj"] for r in groups[key]])
        per_group.append(math.sqrt(np.mean(err ** 2)))
    return float(np.mean(per_group))


def rmse_mean_words(table, fit: SigmoidFit, i_max: float) -> float:
    """RMS over groups of sigmoid(mean d) against the group's subjective score."""
    groups = _group_rows(_scored(table))
    err = []
    for key in sorted(groups, key=str):
        rows = groups[key]
        d_mean = np.mean([r["d"] for r in rows])
        subj = np.mean([r["I_subj"] for r in rows])
        err.append(sigmoid_map(d_mean, fit, i_max) - subj)
    return float(math.sqrt(np.mean(np.square(err))))


@dataclass(frozen=True)
class YoudenResult:
    threshold: float
    youden_index: float
    tpr: float
    fpr: float


def youden_threshold(scores, labels) -> YoudenResult:
    """Observed score maximizing TPR - FPR under the 'score >= threshold is a hit' rule.

    Ties go to the lowest threshold.
    """
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels).astype(bool)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ValidationError(f"scores and labels differ in shape: {scores.shape} vs {labels.shape}")
    if labels.all() or not labels.any():
        raise ValidationError("youden_threshold needs both hits and misses")

    fpr, tpr, thresholds = roc_curve(labels, scores, drop_intermediate=False)
    observed = np.isin(thresholds, scores)
    j = tpr - fpr
    best = j[observed].max()
    candidates = observed & (j >= best - 1e-12)
    k = int(np.flatnonzero(candidates)[np.argmin(thresholds[candidates])])
    if best <= 0:
        warn(f"best Youden index is {best:g}; scores do not separate hits from misses")
    return YoudenResult(threshold=float(thresholds[k]), youden_index=float(j[k]),
                        tpr=float(tpr[k]), fpr=float(fpr[k]))


def sentence_si(word_scores, threshold: float) -> float:
    """Percent of words whose score reaches the threshold."""
    word_scores = np.asarray(word_scores, dtype=float)
    if word_scores.size == 0:
        raise ValidationError("sentence_si needs at least one word score")
    return 100.0 * np.count_nonzero(word_scores >= threshold) / word_scores.size


def segment_bounds(n_samples: int, sample_rate: int, spans, pad: float = WORD_PAD) -> list:
    """Sample ranges of the padded word spans, clamped to the signal."""
    duration = n_samples / sample_rate
    bounds = []
    for start, end in spans:
        if end < start:
            raise ValidationError(f"inverted word span ({start}, {end})")
        lo = max(0.0, start - pad)
        hi = min(duration, end + pad)
        bounds.append((int(round(lo * sample_rate)), int(round(hi * sample_rate))))
    return bounds


def segment_words(signal_in, sample_rate: int, spans, pad: float = WORD_PAD) -> list:
    """Cut word segments padded by `pad` seconds on both sides, clamped to the signal."""
    x = np.asarray(signal_in)
    return [x[lo:hi] for lo, hi in segment_bounds(x.shape[0], sample_rate, spans, pad)]


def better_ear_score(score_left: float, score_right: float) -> float:
    if not (math.isfinite(score_left) and math.isfinite(score_right)):
        raise ValidationError("ear scores must be finite")
    return max(score_left, score_right)
