"""Ideal ratio mask and the binary mask file format."""
from pathlib import Path

import numpy as np

from utils import ValidationError, AudioIOError
from .stft import StftConfig, stft, istft

MASK_MAGIC = b"GIRM"
MASK_HEADER_FIELDS = ("n_freq", "n_frames", "sample_rate", "frame_len", "frame_shift")


def ideal_ratio_mask(spec_s, spec_n) -> np.ndarray:
    """M = sqrt(|S|^2 / (|S|^2 + |N|^2)); empty cells get 0."""
    spec_s = np.asarray(spec_s)
    spec_n = np.asarray(spec_n)
    if spec_s.shape != spec_n.shape:
        raise ValidationError(f"spectrogram shapes differ: {spec_s.shape} vs {spec_n.shape}")
    ps = np.abs(spec_s) ** 2
    total = ps + np.abs(spec_n) ** 2
    mask = np.zeros(total.shape)
    ok = total > 0
    mask[ok] = np.sqrt(ps[ok] / total[ok])
    return mask


def enhance_irm_with_mask(speech_at_ear, noise, config: StftConfig = StftConfig(), sample_rate: int = None):
    """Masked mixture and the mask applied to it."""
    speech = np.asarray(speech_at_ear, dtype=float)
    noise = np.asarray(noise, dtype=float)
    if speech.shape != noise.shape or speech.ndim != 1:
        raise ValidationError(f"speech and noise lengths differ: {speech.shape} vs {noise.shape}")
    if sample_rate is not None and sample_rate != config.sample_rate:
        raise ValidationError(
            f"IRM runs at {config.sample_rate} Hz, got {sample_rate} Hz; resample first")
    mask = ideal_ratio_mask(stft(speech, config), stft(noise, config))
    mixture = stft(speech + noise, config)
    return istft(mask * mixture, config, length=speech.size), mask


def enhance_irm(speech_at_ear, noise, config: StftConfig = StftConfig(), sample_rate: int = None) -> np.ndarray:
    return enhance_irm_with_mask(speech_at_ear, noise, config, sample_rate)[0]


def save_mask(path, mask, config: StftConfig):
    """Little-endian header (magic + 5 x uint32) followed by float32 data, row-major."""
    mask = np.asarray(mask, dtype='<f4')
    if mask.ndim != 2:
        raise ValidationError(f"mask must be 2-D, got shape {mask.shape}")
    header = np.array([mask.shape[0], mask.shape[1], config.sample_rate, config.nperseg, config.hop],
                      dtype='<u4')
    with open(path, 'wb') as f:
        f.write(MASK_MAGIC)
        f.write(header.tobytes())
        f.write(np.ascontiguousarray(mask).tobytes())


def load_mask(path):
    """Return (mask, header dict) from a mask file."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except FileNotFoundError:
        raise AudioIOError(f"mask file not found: {path}")
    header_size = len(MASK_MAGIC) + 4 * len(MASK_HEADER_FIELDS)
    if len(raw) < header_size or raw[:len(MASK_MAGIC)] != MASK_MAGIC:
        raise ValidationError(f"{path} is not a mask file")
    values = np.frombuffer(raw[len(MASK_MAGIC):header_size], dtype='<u4')
    header = {name: int(v) for name, v in zip(MASK_HEADER_FIELDS, values)}
    data = np.frombuffer(raw[header_size:], dtype='<f4')
    expected = header["n_freq"] * header["n_frames"]
    if data.size != expected:
        raise ValidationError(f"{path}: expected {expected} mask values, found {data.size}")
    return data.reshape(header["n_freq"], header["n_frames"]).astype(float), header
