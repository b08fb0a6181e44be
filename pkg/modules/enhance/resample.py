"""Polyphase 16 kHz <-> 48 kHz conversion."""
from functools import lru_cache

import numpy as np
from scipy import signal

from utils import ValidationError

SUPPORTED_RATES = (16000, 48000)
STOPBAND_ATTENUATION = 70.0  # dB
TRANSITION_WIDTH = 1600.0    # Hz, centred on 8 kHz


@lru_cache(maxsize=2)
def anti_alias_filter(high_rate: int = 48000, low_rate: int = 16000) -> np.ndarray:
    """Kaiser low-pass at the low rate's Nyquist, designed at the high rate."""
    nyquist = high_rate / 2.0
    numtaps, beta = signal.kaiserord(STOPBAND_ATTENUATION, TRANSITION_WIDTH / nyquist)
    numtaps |= 1
    return signal.firwin(numtaps, low_rate / 2.0, window=('kaiser', beta), fs=high_rate)


def resample(x, from_rate: int, to_rate: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if from_rate == to_rate:
        return x.copy()
    if {from_rate, to_rate} != set(SUPPORTED_RATES):
        raise ValidationError(
            f"unsupported rate pair {from_rate} -> {to_rate} Hz (supported: 16000 <-> 48000)")
    h = anti_alias_filter()
    if to_rate > from_rate:
        return signal.resample_poly(x, 3, 1, window=h)
    return signal.resample_poly(x, 1, 3, window=h)
