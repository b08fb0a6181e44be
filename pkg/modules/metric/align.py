"""Waveform-level and per-channel EPgram time alignment by cross-correlation."""
from dataclasses import dataclass

import numpy as np
from scipy import signal

from utils import ValidationError
from modules.gcfb import EPgram

GLOBAL_MAX_LAG = 0.5  # seconds
# Normalized peak below which the test is not shifted before analysis
MIN_GLOBAL_CORRELATION = 0.1


def global_xcorr_peak(ref, test, sample_rate: int, max_lag: float = GLOBAL_MAX_LAG) -> tuple:
    """(lag, peak): delay of test relative to ref in samples and its normalized correlation."""
    ref = np.asarray(ref, dtype=float)
    test = np.asarray(test, dtype=float)
    if ref.size == 0 or test.size == 0:
        raise ValidationError("global_align needs non-empty reference and test signals")
    energy = np.sqrt(np.sum(ref ** 2) * np.sum(test ** 2))
    if energy == 0:
        raise ValidationError("global_align cannot align an all-zero signal")

    xcorr = signal.correlate(test, ref, mode='full', method='fft') / energy
    lags = signal.correlation_lags(test.size, ref.size, mode='full')
    limit = int(round(max_lag * sample_rate))
    window = np.abs(lags) <= limit
    best = int(np.argmax(xcorr[window]))
    return int(lags[window][best]), float(xcorr[window][best])


def global_align(ref, test, sample_rate: int, max_lag: float = GLOBAL_MAX_LAG) -> int:
    """Delay of test relative to ref, in samples, within +-max_lag seconds."""
    return global_xcorr_peak(ref, test, sample_rate, max_lag)[0]


def apply_lag(test, lag: int, length: int) -> np.ndarray:
    """Shift test earlier by lag samples into a zero-padded buffer of the given length."""
    test = np.asarray(test, dtype=float)
    out = np.zeros(length)
    src_start = max(lag, 0)
    dst_start = max(-lag, 0)
    n = min(test.size - src_start, length - dst_start)
    if n > 0:
        out[dst_start:dst_start + n] = test[src_start:src_start + n]
    return out


@dataclass
class ChannelAlignment:
    ep: EPgram
    shifts: np.ndarray  # frames, per channel


def _best_shift(ref_row: np.ndarray, test_row: np.ndarray, max_shift: int) -> int:
    r = ref_row - ref_row.mean()
    t = test_row - test_row.mean()
    if not np.any(r) or not np.any(t):
        return 0
    xcorr = signal.correlate(t, r, mode='full', method='fft')
    lags = signal.correlation_lags(t.size, r.size, mode='full')
    window = np.abs(lags) <= max_shift
    lags, xcorr = lags[window], xcorr[window]
    # Smallest |shift| wins a tie
    order = np.argsort(np.abs(lags), kind='stable')
    return int(lags[order][np.argmax(xcorr[order])])


def align_epgram_channels(ep_ref: EPgram, ep_test: EPgram, t_ma: float) -> ChannelAlignment:
    """Shift each test row onto its reference row within +-t_ma."""
    if ep_ref.levels.shape != ep_test.levels.shape:
        raise ValidationError(
            f"EPgram shapes differ: reference {ep_ref.levels.shape}, test {ep_test.levels.shape}")
    if ep_ref.frame_shift != ep_test.frame_shift:
        raise ValidationError("EPgram frame shifts differ")

    max_shift = int(round(t_ma / ep_ref.frame_shift))
    n_frames = ep_ref.n_frames
    aligned = np.empty_like(ep_test.levels)
    shifts = np.zeros(ep_ref.n_channels, dtype=int)
    for i in range(ep_ref.n_channels):
        shifts[i] = _best_shift(ep_ref.levels[i], ep_test.levels[i], max_shift)
        aligned[i] = apply_lag(ep_test.levels[i], shifts[i], n_frames)

    return ChannelAlignment(
        ep=EPgram(levels=aligned, channel_freqs=ep_test.channel_freqs, frame_shift=ep_test.frame_shift),
        shifts=shifts,
    )
