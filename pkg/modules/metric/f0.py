"""Fundamental-frequency track of the reference speech via normalized cross-correlation."""
import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import signal

from utils import ValidationError, AudioIOError
from modules.gcfb import FRAME_SHIFT

F0_MIN = 60.0
F0_MAX = 400.0
VOICING_THRESHOLD = 0.5
ANALYSIS_FRAME = 0.040  # seconds
ANALYSIS_HOP = 0.010    # seconds
F0_EPSILON = 1e-4
# A lag counts as a period candidate when its NCCF is within this share of the best
CANDIDATE_RATIO = 0.9


@dataclass
class F0Track:
    values: np.ndarray  # Hz per EPgram frame
    epsilon: float = F0_EPSILON

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if not self.epsilon > 0:
            raise ValidationError(f"epsilon must be positive, got {self.epsilon}")
        if np.any(self.values < self.epsilon):
            raise ValidationError("F0 values must be >= epsilon")

    @property
    def voiced(self) -> np.ndarray:
        return self.values > self.epsilon


def n_epgram_frames(n_samples: int, sample_rate: int) -> int:
    return int(math.floor(n_samples / (sample_rate * FRAME_SHIFT) + 1e-9))


def nccf(frame: np.ndarray, window: int, min_lag: int, max_lag: int) -> np.ndarray:
    """NCCF of the first `window` samples against the segment at lags min_lag..max_lag."""
    head = frame[:window]
    corr = signal.correlate(frame[:window + max_lag], head, mode='valid', method='fft')
    sq = np.concatenate(([0.0], np.cumsum(frame[:window + max_lag] ** 2)))
    lags = np.arange(min_lag, max_lag + 1)
    e0 = sq[window]
    e_lag = sq[lags + window] - sq[lags]
    denom = np.sqrt(e0 * e_lag)
    out = np.zeros(lags.size)
    ok = denom > 0
    out[ok] = corr[lags][ok] / denom[ok]
    return out


def _pick_period(values: np.ndarray, min_lag: int) -> float:
    """Fractional lag of the first local peak reaching CANDIDATE_RATIO of the best NCCF."""
    best = values.max()
    k = int(np.argmax(values >= CANDIDATE_RATIO * best))
    while k + 1 < values.size and values[k + 1] > values[k]:
        k += 1
    offset = 0.0
    if 0 < k < values.size - 1:
        y0, y1, y2 = values[k - 1], values[k], values[k + 1]
        curvature = y0 - 2.0 * y1 + y2
        if curvature < 0:
            offset = 0.5 * (y0 - y2) / curvature
    return min_lag + k + offset


def frame_f0(x: np.ndarray, sample_rate: int) -> np.ndarray:
    """F0 per 10 ms analysis frame; 0 for unvoiced frames."""
    window = int(round(ANALYSIS_FRAME * sample_rate))
    hop = int(round(ANALYSIS_HOP * sample_rate))
    min_lag = int(math.floor(sample_rate / F0_MAX))
    max_lag = int(math.ceil(sample_rate / F0_MIN))
    n_frames = max(1, int(math.ceil(x.size / hop)))
    padded = np.concatenate([x, np.zeros(n_frames * hop + window + max_lag - x.size)])

    f0 = np.zeros(n_frames)
    for m in range(n_frames):
        frame = padded[m * hop:m * hop + window + max_lag]
        if not np.any(frame[:window]):
            continue
        values = nccf(frame, window, min_lag, max_lag)
        if values.max() < VOICING_THRESHOLD:
            continue
        f0[m] = sample_rate / _pick_period(values, min_lag)
    return f0


def to_epgram_grid(frame_values: np.ndarray, n_frames: int) -> np.ndarray:
    """Hold-resample analysis-frame values onto the 0.5 ms EPgram grid by nearest frame centre."""
    window = ANALYSIS_FRAME
    t = (np.arange(n_frames) + 0.5) * FRAME_SHIFT
    idx = np.round((t - window / 2.0) / ANALYSIS_HOP).astype(int)
    idx = np.clip(idx, 0, frame_values.size - 1)
    return frame_values[idx]


def estimate_f0(ref, sample_rate: int, epsilon: float = F0_EPSILON, n_frames: int = None) -> F0Track:
    x = np.asarray(ref, dtype=float)
    if x.size == 0:
        raise ValidationError("cannot estimate F0 of an empty signal")
    if n_frames is None:
        n_frames = n_epgram_frames(x.size, sample_rate)
    values = to_epgram_grid(frame_f0(x, sample_rate), n_frames)
    return F0Track(values=np.where(values > 0, values, epsilon), epsilon=epsilon)


def load_f0_track(path, n_frames: int, epsilon: float = F0_EPSILON) -> F0Track:
    """Read an external F0 track (CSV header `time,f0`; f0 <= 0 means unvoiced)."""
    path = Path(path)
    try:
        with open(path, 'r', newline='') as f:
            reader = csv.DictReader(f)
            if reader.fieldnames is None or not {"time", "f0"} <= set(reader.fieldnames):
                raise ValidationError(f"{path}: F0 file needs a 'time,f0' header")
            rows = [(float(r["time"]), float(r["f0"])) for r in reader]
    except FileNotFoundError:
        raise AudioIOError(f"F0 file not found: {path}")
    except (TypeError, ValueError) as e:
        if isinstance(e, ValidationError):
            raise
        raise ValidationError(f"{path}: unreadable F0 value ({e})")
    if not rows:
        raise ValidationError(f"{path}: F0 file has no rows")

    rows.sort()
    times = np.array([r[0] for r in rows])
    f0 = np.array([r[1] for r in rows])
    t = (np.arange(n_frames) + 0.5) * FRAME_SHIFT
    idx = np.clip(np.searchsorted(times, t, side='right') - 1, 0, times.size - 1)
    values = f0[idx]
    return F0Track(values=np.where(values > 0, np.maximum(values, epsilon), epsilon), epsilon=epsilon)
