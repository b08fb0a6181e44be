import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from utils import ValidationError

LEFT = "left"
RIGHT = "right"
EARS = (LEFT, RIGHT)

HL_MIN = -10.0
HL_MAX = 120.0

# Pure-tone average band used for the better-ear decision
BETTER_EAR_BAND = (500.0, 4000.0)

# NH active gain at threshold (dB). Low frequencies carry the larger active
# share; the values above 2 kHz taper off. Engineering defaults, see DESIGN.md.
MAX_ACTIVE_GAIN_TABLE = {
    125.0: 30.0,
    250.0: 30.0,
    500.0: 30.0,
    1000.0: 30.0,
    2000.0: 30.0,
    4000.0: 25.0,
    8000.0: 20.0,
}


@dataclass(frozen=True)
class Audiogram:
    """Pure-tone hearing thresholds of one ear."""
    frequencies: tuple
    levels: tuple
    ear: str

    def __post_init__(self):
        freqs = tuple(float(f) for f in self.frequencies)
        levels = tuple(float(v) for v in self.levels)
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "levels", levels)

        if self.ear not in EARS:
            raise ValidationError(f"ear must be 'left' or 'right', got {self.ear!r}")
        if len(freqs) != len(levels):
            raise ValidationError(
                f"{self.ear}.levels has {len(levels)} values but {self.ear}.freqs has {len(freqs)}")
        if len(freqs) < 2:
            raise ValidationError(f"{self.ear}.freqs needs at least 2 audiometric frequencies")
        if any(not math.isfinite(f) or f <= 0 for f in freqs):
            raise ValidationError(f"{self.ear}.freqs must be positive and finite")
        if any(b <= a for a, b in zip(freqs, freqs[1:])):
            raise ValidationError(f"{self.ear}.freqs must be strictly ascending")
        for f, level in zip(freqs, levels):
            if not math.isfinite(level) or not HL_MIN <= level <= HL_MAX:
                raise ValidationError(
                    f"{self.ear}.levels out of range at {f:g} Hz: {level} dB HL "
                    f"(allowed {HL_MIN:g} to {HL_MAX:g})")

    @classmethod
    def flat(cls, level: float, ear: str = LEFT) -> "Audiogram":
        freqs = (125.0, 250.0, 500.0, 1000.0, 2000.0, 4000.0, 8000.0)
        return cls(freqs, tuple(level for _ in freqs), ear)


@dataclass(frozen=True)
class HlSplit:
    """Active (OHC) and passive (IHC) parts of a total hearing loss in dB."""
    hl_act: float
    hl_pas: float

    @property
    def hl_total(self) -> float:
        return self.hl_act + self.hl_pas


def interpolate_hl(audiogram: Audiogram, target_freqs: Sequence[float]) -> np.ndarray:
    """Interpolate hearing levels linearly on a log-frequency axis.

    Targets outside the measured range take the level of the nearest
    measured frequency.
    """
    targets = np.atleast_1d(np.asarray(target_freqs, dtype=float))
    if np.any(targets <= 0) or not np.all(np.isfinite(targets)):
        raise ValidationError("target frequencies must be positive and finite")
    return np.interp(np.log10(targets),
                     np.log10(audiogram.frequencies),
                     audiogram.levels)


def pure_tone_average(audiogram: Audiogram) -> float:
    """Mean HL over the measured frequencies within 500-4000 Hz.

    A band edge that was not measured is interpolated and joins the mean.
    """
    lo, hi = BETTER_EAR_BAND
    if audiogram.frequencies[0] > lo or audiogram.frequencies[-1] < hi:
        raise ValidationError(
            f"{audiogram.ear} audiogram does not cover {lo:g}-{hi:g} Hz "
            f"(measured {audiogram.frequencies[0]:g}-{audiogram.frequencies[-1]:g} Hz)")
    freqs = np.asarray(audiogram.frequencies)
    levels = np.asarray(audiogram.levels)
    inside = (freqs >= lo) & (freqs <= hi)
    values = list(levels[inside])
    for edge in (lo, hi):
        if not np.any(freqs == edge):
            values.append(float(interpolate_hl(audiogram, [edge])[0]))
    return float(np.mean(values))


def max_active_gain(freqs: Sequence[float], table: dict = None) -> np.ndarray:
    """NH active gain at threshold per frequency, log-frequency interpolated."""
    table = MAX_ACTIVE_GAIN_TABLE if table is None else table
    knots = sorted(table)
    freqs = np.atleast_1d(np.asarray(freqs, dtype=float))
    return np.interp(np.log10(freqs), np.log10(knots), [table[k] for k in knots])


def apportion_hl(hl_total: float, alpha: float, max_active_gain: float) -> HlSplit:
    """Split HL_total into active and passive loss under compression health alpha.

    The active loss is the lost part of the NH active gain, (1 - alpha) * G,
    but never more than the total loss itself.
    """
    if hl_total < 0:
        raise ValidationError(f"hl_total must be >= 0, got {hl_total}")
    if max_active_gain < 0:
        raise ValidationError(f"max_active_gain must be >= 0, got {max_active_gain}")
    if not 0.0 <= alpha <= 1.0:
        raise ValidationError(f"alpha out of range: {alpha}")
    hl_act = min((1.0 - alpha) * max_active_gain, hl_total)
    return HlSplit(hl_act=hl_act, hl_pas=hl_total - hl_act)
