"""ERB-spaced gammachirp band-pass filters and their envelope calibration."""
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import signal

from utils import ValidationError

FRAME_SHIFT = 0.0005  # seconds, fixed EPgram hop

# Glasberg & Moore ERB scale
ERB_Q = 24.7
ERB_SLOPE = 4.37 / 1000.0
ERB_NUMBER_SCALE = 21.4

# Static gammachirp shape
GC_ORDER = 4
GC_BANDWIDTH = 1.019
GC_CHIRP = -2.96

ENVELOPE_CUTOFF = 1000.0  # Hz, smoothing after half-wave rectification
ENVELOPE_ORDER = 2


@dataclass(frozen=True)
class FilterbankConfig:
    sample_rate: int
    n_channels: int = 100
    f_min: float = 100.0
    f_max: float = 6000.0
    frame_shift: float = FRAME_SHIFT
    order: int = GC_ORDER
    b: float = GC_BANDWIDTH
    c: float = GC_CHIRP

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValidationError(f"sample_rate must be positive, got {self.sample_rate}")
        if self.n_channels < 2:
            raise ValidationError(f"n_channels must be >= 2, got {self.n_channels}")
        if not 0 < self.f_min < self.f_max < self.sample_rate / 2:
            raise ValidationError(
                f"need 0 < f_min < f_max < sample_rate/2, got f_min={self.f_min}, "
                f"f_max={self.f_max}, sample_rate={self.sample_rate}")
        if self.frame_shift != FRAME_SHIFT:
            raise ValidationError(f"frame_shift is fixed at {FRAME_SHIFT} s, got {self.frame_shift}")

    @classmethod
    def from_config(cls, section: dict, sample_rate: int) -> "FilterbankConfig":
        """Build from the 'filterbank' section of the YAML config."""
        section = section or {}
        return cls(
            sample_rate=int(sample_rate),
            n_channels=int(section.get("n_channels", 100)),
            f_min=float(section.get("f_min", 100.0)),
            f_max=float(section.get("f_max", 6000.0)),
        )

    @property
    def frame_length(self) -> float:
        """Samples per EPgram frame (may be fractional)."""
        return self.sample_rate * self.frame_shift


def erb_number(freq):
    """ERB-number (Cams) of a frequency in Hz."""
    return ERB_NUMBER_SCALE * np.log10(ERB_SLOPE * np.asarray(freq, dtype=float) + 1.0)


def erb_to_freq(erb_num):
    return (10.0 ** (np.asarray(erb_num, dtype=float) / ERB_NUMBER_SCALE) - 1.0) / ERB_SLOPE


def erb_width(freq):
    """Equivalent rectangular bandwidth in Hz at frequency freq."""
    return ERB_Q * (ERB_SLOPE * np.asarray(freq, dtype=float) + 1.0)


def erb_space(config: FilterbankConfig) -> np.ndarray:
    """Channel peak frequencies equally spaced on the ERB-number scale."""
    numbers = np.linspace(erb_number(config.f_min), erb_number(config.f_max), config.n_channels)
    freqs = erb_to_freq(numbers)
    freqs[0] = config.f_min
    freqs[-1] = config.f_max
    return freqs


def peak_to_carrier(f_peak, order: int = GC_ORDER, b: float = GC_BANDWIDTH, c: float = GC_CHIRP):
    """Carrier frequency f_r whose gammachirp peaks at f_peak.

    Solves f_peak = f_r + c*b*ERB(f_r)/n; ERB is linear in f_r so the
    solution is closed-form.
    """
    k = c * b * ERB_Q / order
    return (np.asarray(f_peak, dtype=float) - k) / (1.0 + k * ERB_SLOPE)


def gammachirp_ir(f_peak: float, sample_rate: int, order: int = GC_ORDER,
                  b: float = GC_BANDWIDTH, c: float = GC_CHIRP) -> np.ndarray:
    """Causal gammachirp impulse response normalized to unit gain at f_peak."""
    f_r = float(peak_to_carrier(f_peak, order, b, c))
    erb = float(erb_width(f_r))
    decay = 2.0 * math.pi * b * erb
    n_taps = int(math.ceil((order + 16) / decay * sample_rate))
    t = np.arange(1, n_taps + 1) / sample_rate
    ir = t ** (order - 1) * np.exp(-decay * t) * np.cos(2.0 * math.pi * f_r * t + c * np.log(t))

    # DTFT at the peak frequency
    gain = np.abs(np.sum(ir * np.exp(-2j * math.pi * f_peak * t)))
    return ir / gain


def envelope_filter(sample_rate: int) -> np.ndarray:
    return signal.butter(ENVELOPE_ORDER, ENVELOPE_CUTOFF, btype='low', fs=sample_rate, output='sos')


def envelope_scale(f_peak: float, sample_rate: int, sos: np.ndarray) -> float:
    """Amplitude scale so a steady tone at f_peak yields its own power in the envelope.

    A half-wave rectified cosine of amplitude A has DC A/pi, fundamental A/2 and
    even harmonics 2A/(pi*(4m^2 - 1)); each component is weighted by the
    smoothing filter and summed in power.
    """
    nyquist = sample_rate / 2.0
    harmonics = [f_peak]
    amplitudes = [0.5]
    m = 1
    while 2 * m * f_peak < nyquist:
        harmonics.append(2 * m * f_peak)
        amplitudes.append(2.0 / (math.pi * (4 * m * m - 1)))
        m += 1
    _, h = signal.sosfreqz(sos, worN=np.asarray(harmonics), fs=sample_rate)
    power = (1.0 / math.pi) ** 2 + np.sum((np.abs(h) * np.asarray(amplitudes)) ** 2) / 2.0
    return math.sqrt(0.5 / power)


@dataclass(frozen=True)
class GammachirpBank:
    channel_freqs: np.ndarray
    impulse_responses: tuple
    envelope_sos: np.ndarray
    envelope_scales: np.ndarray


@lru_cache(maxsize=8)
def design_gammachirp_bank(config: FilterbankConfig) -> GammachirpBank:
    freqs = erb_space(config)
    sos = envelope_filter(config.sample_rate)
    irs = tuple(gammachirp_ir(f, config.sample_rate, config.order, config.b, config.c) for f in freqs)
    scales = np.array([envelope_scale(f, config.sample_rate, sos) for f in freqs])
    return GammachirpBank(channel_freqs=freqs, impulse_responses=irs,
                          envelope_sos=sos, envelope_scales=scales)
