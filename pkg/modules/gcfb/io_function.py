"""Cochlear input-output function and the per-channel listener parameters feeding it."""
from dataclasses import dataclass

import numpy as np

from utils import ValidationError
from modules.profile import (
    Audiogram, HlSplit, interpolate_hl, max_active_gain, apportion_hl,
)

NH_KNEE = 30.0     # dB SPL, start of compression
NH_SLOPE = 0.5     # compressive slope above the knee


@dataclass(frozen=True)
class NhCurve:
    """Piecewise-linear NH input-output curve in dB.

    Linear with gain G below the knee, compressive slope until the curve meets
    the identity line at knee + G/(1 - slope), linear (no gain) above.
    """
    gain: float = 30.0
    knee: float = NH_KNEE
    slope: float = NH_SLOPE

    def __post_init__(self):
        if self.gain < 0:
            raise ValidationError(f"gain must be >= 0, got {self.gain}")
        if not 0.0 < self.slope <= 1.0:
            raise ValidationError(f"slope must be within (0, 1], got {self.slope}")

    @property
    def upper_knee(self) -> float:
        if self.slope == 1.0:
            return self.knee
        return self.knee + self.gain / (1.0 - self.slope)

    def __call__(self, level):
        level = np.asarray(level, dtype=float)
        compressed = self.knee + self.gain + self.slope * (level - self.knee)
        out = np.where(level < self.knee, level + self.gain,
                       np.where(level < self.upper_knee, compressed, level))
        return float(out) if out.ndim == 0 else out


def io_function(input_level, alpha, split: HlSplit, nh_curve) -> np.ndarray:
    """Blend of the NH curve and the linear curve, lowered by the passive loss.

    alpha and split may be scalars or per-channel arrays broadcasting against
    input_level.
    """
    input_level = np.asarray(input_level, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    out = alpha * nh_curve(input_level) + (1.0 - alpha) * input_level - np.asarray(split.hl_pas)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class ListenerSide:
    """Per-channel IO parameters of one ear.

    alpha_eff is the surviving share of each channel's active gain. It never
    drops below the profile alpha and is raised where the total loss is
    smaller than the lost active gain.
    """
    alpha: float
    alpha_eff: np.ndarray
    hl_act: np.ndarray
    hl_pas: np.ndarray
    gains: np.ndarray

    @property
    def split(self) -> HlSplit:
        return HlSplit(hl_act=self.hl_act, hl_pas=self.hl_pas)

    @property
    def hl_total(self) -> np.ndarray:
        return self.hl_act + self.hl_pas


def listener_side(audiogram: Audiogram, alpha: float, channel_freqs, gain_table: dict = None) -> ListenerSide:
    """Derive per-channel HL_act/HL_pas and alpha_eff from an audiogram."""
    if not 0.0 <= alpha <= 1.0:
        raise ValidationError(f"alpha out of range: {alpha}")
    freqs = np.asarray(channel_freqs, dtype=float)
    # Better-than-zero thresholds carry no loss to apportion
    hl_total = np.clip(interpolate_hl(audiogram, freqs), 0.0, None)
    gains = max_active_gain(freqs, gain_table)

    hl_act = np.empty_like(freqs)
    hl_pas = np.empty_like(freqs)
    for i, (hl, g) in enumerate(zip(hl_total, gains)):
        part = apportion_hl(float(hl), alpha, float(g))
        hl_act[i] = part.hl_act
        hl_pas[i] = part.hl_pas

    alpha_eff = np.ones_like(freqs)
    active = gains > 0
    alpha_eff[active] = 1.0 - hl_act[active] / gains[active]
    return ListenerSide(alpha=alpha, alpha_eff=alpha_eff, hl_act=hl_act, hl_pas=hl_pas, gains=gains)


def normal_hearing_side(channel_freqs, gain_table: dict = None) -> ListenerSide:
    """HL 0 dB and alpha 1 on every channel (the reference analysis)."""
    freqs = np.asarray(channel_freqs, dtype=float)
    zeros = np.zeros_like(freqs)
    return ListenerSide(alpha=1.0, alpha_eff=np.ones_like(freqs), hl_act=zeros, hl_pas=zeros.copy(),
                        gains=max_active_gain(freqs, gain_table))


def excitation_level(input_level: np.ndarray, side: ListenerSide, knee: float = NH_KNEE,
                     slope: float = NH_SLOPE) -> np.ndarray:
    """Map input levels [channels x frames] to EP levels relative to the AT.

    The NH active gain is removed from the output, so a sub-knee input on a
    healthy channel maps to itself and the loss shifts it down by HL_total.
    """
    out = np.empty_like(input_level, dtype=float)
    for i in range(input_level.shape[0]):
        curve = NhCurve(gain=float(side.gains[i]), knee=knee, slope=slope)
        split = HlSplit(hl_act=float(side.hl_act[i]), hl_pas=float(side.hl_pas[i]))
        out[i] = io_function(input_level[i], float(side.alpha_eff[i]), split, curve) - side.gains[i]
    return out
