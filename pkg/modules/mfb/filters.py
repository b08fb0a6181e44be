"""IIR modulation filterbank: a 1 Hz low-pass plus Q=1 octave band-passes."""
import math
from dataclasses import dataclass

import numpy as np
from scipy import signal

from utils import ValidationError
from modules.gcfb import FRAME_SHIFT
from modules.profile import TmtfParams

MFB_CENTER_FREQS = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0)
MFB_MAX_FREQ = 32.0
MFB_Q = 1.0


@dataclass(frozen=True)
class MfbConfig:
    center_freqs: tuple = MFB_CENTER_FREQS
    frame_rate: float = round(1.0 / FRAME_SHIFT)
    q: float = MFB_Q

    def __post_init__(self):
        freqs = tuple(float(f) for f in self.center_freqs)
        object.__setattr__(self, "center_freqs", freqs)
        if len(freqs) < 2 or freqs[0] != 1.0:
            raise ValidationError("center_freqs must start with the 1 Hz low-pass and hold at least one band")
        if any(b <= a for a, b in zip(freqs, freqs[1:])):
            raise ValidationError("center_freqs must be strictly ascending")
        if freqs[-1] > MFB_MAX_FREQ:
            raise ValidationError(f"modulation center frequencies are limited to {MFB_MAX_FREQ:g} Hz")
        if self.frame_rate <= 2.0 * freqs[-1]:
            raise ValidationError(
                f"frame rate {self.frame_rate:g} Hz too low for a {freqs[-1]:g} Hz modulation band")

    @property
    def n_bands(self) -> int:
        return len(self.center_freqs)


@dataclass(frozen=True)
class ModulationFilterbank:
    config: MfbConfig
    coeffs: tuple  # ((b, a), ...) one pair per band


@dataclass(frozen=True)
class TmtfGains:
    a_ref: np.ndarray
    a_test: np.ndarray


def bandpass_coeffs(f0: float, fs: float, q: float = MFB_Q):
    """Second-order band-pass with unit gain at f0."""
    w0 = 2.0 * math.pi * f0 / fs
    alpha = math.sin(w0) / (2.0 * q)
    b = np.array([alpha, 0.0, -alpha])
    a = np.array([1.0 + alpha, -2.0 * math.cos(w0), 1.0 - alpha])
    return b / a[0], a / a[0]


def design_filterbank(config: MfbConfig = MfbConfig()) -> ModulationFilterbank:
    coeffs = [signal.butter(2, config.center_freqs[0], btype='low', fs=config.frame_rate)]
    for f0 in config.center_freqs[1:]:
        coeffs.append(bandpass_coeffs(f0, config.frame_rate, config.q))
    return ModulationFilterbank(config=config, coeffs=tuple(coeffs))


def frequency_response(bank: ModulationFilterbank, freqs) -> np.ndarray:
    """Complex response [bands x len(freqs)] at modulation frequencies in Hz."""
    freqs = np.atleast_1d(np.asarray(freqs, dtype=float))
    rows = []
    for b, a in bank.coeffs:
        _, h = signal.freqz(b, a, worN=freqs, fs=bank.config.frame_rate)
        rows.append(h)
    return np.array(rows)


def tmtf_gains(nh: TmtfParams, hl: TmtfParams, config: MfbConfig = MfbConfig(),
               use_tmtf: bool = True) -> TmtfGains:
    """Peak gains of the modulation bands for the reference (NH) and test (HL) analyses.

    The low-pass band keeps unit gain on both sides. With use_tmtf off the
    test side takes the reference gains.
    """
    f_m = np.asarray(config.center_freqs)
    a_ref = 1.0 / np.sqrt(1.0 + (f_m / nh.f_c) ** 2)
    a_test = 10.0 ** ((nh.l_ps - hl.l_ps) / 20.0) / np.sqrt(1.0 + (f_m / hl.f_c) ** 2)
    a_ref[0] = 1.0
    a_test[0] = 1.0
    if not use_tmtf:
        a_test = a_ref.copy()
    return TmtfGains(a_ref=a_ref, a_test=a_test)
