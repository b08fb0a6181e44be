from dataclasses import dataclass

import numpy as np

from utils import ValidationError, warn
from modules.gcfb import EPgram
from .f0 import F0Track

ABSOLUTE_THRESHOLD = 0.0  # dB


def ssi_weight(f0: F0Track, channel_freqs, h_max: float) -> np.ndarray:
    """F0-dependent channel weights [N x frames]; every column sums to 1."""
    freqs = np.asarray(channel_freqs, dtype=float)
    if h_max <= 0:
        raise ValidationError(f"h_max must be positive, got {h_max}")
    w = np.minimum(freqs[:, None] / (h_max * f0.values[None, :]), 1.0)
    return w / w.sum(axis=0, keepdims=True)


@dataclass
class EfficiencyWeight:
    weights: np.ndarray  # [N]
    n_audible: int
    inaudible: bool


def efficiency_weight(ep_test: EPgram, eta: float) -> EfficiencyWeight:
    """Boost audible channels by (N/N_AT)^eta; channels at or below the AT get 0."""
    if not 0.0 <= eta <= 1.0:
        raise ValidationError(f"eta out of range: {eta}")
    audible = ep_test.time_average() > ABSOLUTE_THRESHOLD
    n_audible = int(audible.sum())
    n = ep_test.n_channels
    if n_audible == 0:
        warn("test EPgram is below the absolute threshold in every channel")
        return EfficiencyWeight(weights=np.zeros(n), n_audible=0, inaudible=True)
    weights = np.where(audible, (n / n_audible) ** eta, 0.0)
    return EfficiencyWeight(weights=weights, n_audible=n_audible, inaudible=False)
