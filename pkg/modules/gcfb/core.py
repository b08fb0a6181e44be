import math
from dataclasses import dataclass

import numpy as np
from scipy import signal

from utils import ValidationError
from .filterbank import FilterbankConfig, design_gammachirp_bank
from .io_function import ListenerSide, excitation_level


@dataclass(frozen=True)
class CalibrationRef:
    spl_at_unit_rms: float = 120.0

    def __post_init__(self):
        if not math.isfinite(self.spl_at_unit_rms) or self.spl_at_unit_rms <= 0:
            raise ValidationError(f"spl_at_unit_rms must be positive and finite, got {self.spl_at_unit_rms}")


@dataclass
class EPgram:
    """Excitation-pattern sequence: levels [n_channels x n_frames] in dB."""
    levels: np.ndarray
    channel_freqs: np.ndarray
    frame_shift: float

    def __post_init__(self):
        self.levels = np.asarray(self.levels, dtype=float)
        self.channel_freqs = np.asarray(self.channel_freqs, dtype=float)
        if self.levels.ndim != 2:
            raise ValidationError(f"EPgram levels must be 2-D, got shape {self.levels.shape}")
        if self.levels.shape[0] != self.channel_freqs.size:
            raise ValidationError(
                f"EPgram has {self.levels.shape[0]} rows but {self.channel_freqs.size} channel frequencies")
        if np.any(np.diff(self.channel_freqs) <= 0):
            raise ValidationError("EPgram channel_freqs must be strictly ascending")
        if not np.all(np.isfinite(self.levels)):
            raise ValidationError("EPgram levels must be finite")

    @property
    def n_channels(self) -> int:
        return self.levels.shape[0]

    @property
    def n_frames(self) -> int:
        return self.levels.shape[1]

    def time_average(self) -> np.ndarray:
        return self.levels.mean(axis=1)


def frame_bounds(n_samples: int, config: FilterbankConfig) -> np.ndarray:
    """Sample boundaries of the 0.5 ms frames; the tail shorter than a frame is dropped."""
    n_frames = int(math.floor(n_samples / config.frame_length + 1e-9))
    return np.round(np.arange(n_frames + 1) * config.frame_length).astype(int)


def channel_powers(signal_in: np.ndarray, config: FilterbankConfig) -> np.ndarray:
    """Frame-mean envelope power per channel, digital full-scale units [N x frames]."""
    bank = design_gammachirp_bank(config)
    bounds = frame_bounds(signal_in.size, config)
    if bounds.size < 2:
        raise ValidationError(
            f"signal has {signal_in.size} samples, shorter than one {config.frame_shift * 1000:g} ms frame")
    counts = np.diff(bounds)
    powers = np.empty((config.n_channels, bounds.size - 1))

    for i, ir in enumerate(bank.impulse_responses):
        band = signal.oaconvolve(signal_in, ir)[:signal_in.size]
        env = signal.sosfilt(bank.envelope_sos, np.maximum(band, 0.0))
        env = (env[:bounds[-1]] * bank.envelope_scales[i]) ** 2
        powers[i] = np.add.reduceat(env, bounds[:-1]) / counts
    return powers


def analyze(signal_in, sample_rate: int, side: ListenerSide, config: FilterbankConfig,
            calib: CalibrationRef = CalibrationRef()) -> EPgram:
    """EPgram of a waveform for one listener side.

    Input levels are in dB SPL with the RMS-1 floor (the AT) added in power,
    so digital silence maps to exactly 0 dB before the IO function.
    """
    x = np.asarray(signal_in, dtype=float)
    if x.ndim != 1:
        raise ValidationError(f"analyze expects a mono waveform, got shape {x.shape}")
    if x.size == 0:
        raise ValidationError("signal is empty")
    if sample_rate != config.sample_rate:
        raise ValidationError(
            f"sample rate {sample_rate} Hz does not match filterbank sample rate {config.sample_rate} Hz")
    if side.gains.size != config.n_channels:
        raise ValidationError(
            f"listener side has {side.gains.size} channels, filterbank has {config.n_channels}")

    powers = channel_powers(x, config) * 10.0 ** (calib.spl_at_unit_rms / 10.0)
    input_level = 10.0 * np.log10(powers + 1.0)
    levels = excitation_level(input_level, side)
    bank = design_gammachirp_bank(config)
    return EPgram(levels=levels, channel_freqs=bank.channel_freqs.copy(), frame_shift=config.frame_shift)
