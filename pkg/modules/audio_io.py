"""WAV reading and writing shared by the commands."""
from pathlib import Path

import numpy as np
import soundfile as sf

from utils import ValidationError, AudioIOError

CHANNEL_NAMES = {"left": 0, "right": 1}


def _channel_index(channel) -> int:
    if isinstance(channel, str):
        if channel.lower() in CHANNEL_NAMES:
            return CHANNEL_NAMES[channel.lower()]
        try:
            return int(channel)
        except ValueError:
            raise ValidationError(f"unknown channel {channel!r} (use left, right or an index)")
    return int(channel)


def read_audio_channels(path):
    """Read a WAV file as float64 [samples x channels] plus its sample rate."""
    path = Path(path)
    if not path.is_file():
        raise AudioIOError(f"audio file not found: {path}")
    try:
        data, sample_rate = sf.read(str(path), dtype='float64', always_2d=True)
    except RuntimeError as e:
        raise AudioIOError(f"cannot read {path}: {e}")
    return data, int(sample_rate)


def read_audio(path, channel=None):
    """Read a mono waveform; stereo files need an explicit channel."""
    data, sample_rate = read_audio_channels(path)
    if data.shape[1] == 1:
        return data[:, 0], sample_rate
    if channel is None:
        raise ValidationError(
            f"{path} has {data.shape[1]} channels; choose one with --channel left|right|<index>")
    index = _channel_index(channel)
    if not 0 <= index < data.shape[1]:
        raise ValidationError(f"{path} has no channel {channel!r}")
    return data[:, index], sample_rate


def write_audio(path, data, sample_rate: int):
    """Write float32 WAV; data is [samples] or [samples x channels]."""
    data = np.asarray(data, dtype=np.float32)
    try:
        sf.write(str(path), data, int(sample_rate), subtype='FLOAT')
    except RuntimeError as e:
        raise AudioIOError(f"cannot write {path}: {e}")
