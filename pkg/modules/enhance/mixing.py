"""Condition synthesis: reverberation by RIR convolution and SNR mixing."""
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import signal

from utils import ValidationError

ACTIVITY_FRAME = 0.020   # seconds
ACTIVITY_RANGE = 20.0    # dB below the median frame level


@dataclass
class MixtureSpec:
    snr: float
    rir_target: Optional[np.ndarray] = None
    rir_noise_list: list = field(default_factory=list)

    def __post_init__(self):
        if not math.isfinite(self.snr):
            raise ValidationError(f"snr must be finite, got {self.snr}")


@dataclass
class MixedCondition:
    speech_at_ear: np.ndarray
    noise: np.ndarray
    mixture: np.ndarray
    noise_gain: float


def active_mask(speech, sample_rate: int) -> np.ndarray:
    """Sample mask of 20 ms frames whose level exceeds the median frame level minus 20 dB.

    The median is taken over frames that carry any energy.
    """
    speech = np.asarray(speech, dtype=float)
    frame = max(1, int(round(ACTIVITY_FRAME * sample_rate)))
    n_frames = int(math.ceil(speech.size / frame))
    padded = np.concatenate([speech, np.zeros(n_frames * frame - speech.size)])
    power = np.mean(padded.reshape(n_frames, frame) ** 2, axis=1)
    nonzero = power > 0
    if not np.any(nonzero):
        raise ValidationError("clean speech is silent; the SNR is undefined")
    level = np.full(n_frames, -np.inf)
    level[nonzero] = 10.0 * np.log10(power[nonzero])
    active = level > np.median(level[nonzero]) - ACTIVITY_RANGE
    return np.repeat(active, frame)[:speech.size]


def _convolve(x: np.ndarray, rir) -> np.ndarray:
    return signal.fftconvolve(x, np.asarray(rir, dtype=float))[:x.size]


def mix_condition(clean, noise, spec: MixtureSpec, sample_rate: int) -> MixedCondition:
    """Reverberate speech and noise, then scale the noise to the requested SNR at the ear."""
    clean = np.asarray(clean, dtype=float)
    noise = np.asarray(noise, dtype=float)
    if clean.size == 0:
        raise ValidationError("clean speech is empty")

    speech_at_ear = _convolve(clean, spec.rir_target) if spec.rir_target is not None else clean.copy()
    if spec.rir_noise_list:
        noise_branch = sum(_convolve(noise, rir) for rir in spec.rir_noise_list)
    else:
        noise_branch = noise
    if noise_branch.size < clean.size:
        raise ValidationError(
            f"noise has {noise_branch.size} samples, shorter than the speech ({clean.size})")
    noise_branch = noise_branch[:clean.size]

    active = active_mask(speech_at_ear, sample_rate)
    p_speech = np.mean(speech_at_ear[active] ** 2)
    p_noise = np.mean(noise_branch[active] ** 2)
    if p_noise == 0:
        raise ValidationError("noise is silent over the speech-active region")

    gain = math.sqrt(p_speech / (p_noise * 10.0 ** (spec.snr / 10.0)))
    scaled = gain * noise_branch
    return MixedCondition(speech_at_ear=speech_at_ear, noise=scaled,
                          mixture=speech_at_ear + scaled, noise_gain=gain)


def measured_snr(speech, noise, sample_rate: int) -> float:
    """SNR in dB over the speech-active region of `speech`."""
    speech = np.asarray(speech, dtype=float)
    noise = np.asarray(noise, dtype=float)
    active = active_mask(speech, sample_rate)
    return 10.0 * math.log10(np.mean(speech[active] ** 2) / np.mean(noise[active] ** 2))


def make_babble(tokens, length: int, n_talkers: int = 8, seed: int = 0, gap: int = 0) -> np.ndarray:
    """Multi-talker babble: n_talkers streams of randomly chosen tokens, summed, unit RMS.

    Each stream starts at a random offset so the talkers do not line up.
    """
    tokens = [np.asarray(t, dtype=float) for t in tokens if len(t)]
    if not tokens:
        raise ValidationError("make_babble needs at least one non-empty token")
    if length <= 0 or n_talkers < 1:
        raise ValidationError("make_babble needs a positive length and at least one talker")
    rng = np.random.default_rng(seed)

    babble = np.zeros(length)
    for _ in range(n_talkers):
        pos = -int(rng.integers(0, max(len(t) for t in tokens)))
        while pos < length:
            token = tokens[int(rng.integers(len(tokens)))]
            start, end = max(pos, 0), min(pos + token.size, length)
            if end > start:
                babble[start:end] += token[start - pos:end - pos]
            pos += token.size + gap
    rms = math.sqrt(np.mean(babble ** 2))
    return babble / rms if rms > 0 else babble
