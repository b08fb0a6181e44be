from dataclasses import dataclass

import numpy as np
from scipy import signal

from utils import ValidationError


@dataclass(frozen=True)
class StftConfig:
    sample_rate: int = 16000
    frame_len: float = 0.064    # seconds, Hann window
    frame_shift: float = 0.016  # seconds

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValidationError(f"sample_rate must be positive, got {self.sample_rate}")
        if abs(self.frame_len / self.frame_shift - 4.0) > 1e-9:
            raise ValidationError(
                f"frame_len/frame_shift must be 4 (75% overlap), got {self.frame_len}/{self.frame_shift}")

    @property
    def nperseg(self) -> int:
        return int(round(self.frame_len * self.sample_rate))

    @property
    def hop(self) -> int:
        return int(round(self.frame_shift * self.sample_rate))

    @property
    def noverlap(self) -> int:
        return self.nperseg - self.hop


def stft(x, config: StftConfig = StftConfig()) -> np.ndarray:
    """Complex spectrogram [freq bins x frames]; FFT length equals the frame length."""
    x = np.asarray(x, dtype=float)
    _, _, spec = signal.stft(x, fs=config.sample_rate, window='hann', nperseg=config.nperseg,
                             noverlap=config.noverlap, boundary='zeros', padded=True)
    return spec


def istft(spec, config: StftConfig = StftConfig(), length: int = None) -> np.ndarray:
    """Overlap-add inverse of stft, trimmed to length when given."""
    _, x = signal.istft(spec, fs=config.sample_rate, window='hann', nperseg=config.nperseg,
                        noverlap=config.noverlap, boundary=True)
    if length is not None:
        if x.size < length:
            x = np.concatenate([x, np.zeros(length - x.size)])
        x = x[:length]
    return x
