import json
import math
import sys
from pathlib import Path

import numpy as np
import pytest
import soundfile as sf

# Import from the repository root like the entry script does
ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

FS = 16000


def speech_like(fs: int = FS, duration: float = 1.5, f0: float = 120.0, rms: float = 0.02,
                syllable_rate: float = 4.0, lead: float = 0.1, tail: float = 0.25) -> np.ndarray:
    """Harmonic complex with a gliding F0, syllabic on/off modulation and pauses.

    Starts with `lead` seconds and ends with `tail` seconds of digital silence;
    one extra pause sits in the middle.
    """
    n = int(round(duration * fs))
    t = np.arange(n) / fs
    contour = f0 * (1.0 + 0.08 * np.sin(2.0 * np.pi * 0.7 * t))
    phase = 2.0 * np.pi * np.cumsum(contour) / fs
    x = np.zeros(n)
    k = 1
    while k * f0 * 1.1 < 5000.0:
        x += np.cos(k * phase) / k
        k += 1
    x *= np.sin(np.pi * syllable_rate * t) ** 2

    gate = np.ones(n)
    gate[t < lead] = 0.0
    gate[t >= duration - tail] = 0.0
    mid = duration / 2.0
    gate[(t >= mid - 0.05) & (t < mid + 0.05)] = 0.0
    x *= gate
    return x * rms / math.sqrt(np.mean(x ** 2))


def write_profile(path: Path, data: dict) -> Path:
    with open(path, 'w') as f:
        json.dump(data, f)
    return path


NH_PROFILE = {
    "listener_id": "NH01",
    "alpha": 1.0,
    "left": {"freqs": [125, 250, 500, 1000, 2000, 4000, 8000], "levels": [0, 0, 0, 0, 0, 0, 0]},
    "right": {"freqs": [125, 250, 500, 1000, 2000, 4000, 8000], "levels": [0, 0, 0, 0, 0, 0, 0]},
}

HL_PROFILE = {
    "listener_id": "HL01",
    "alpha": 0.5,
    "left": {"freqs": [125, 250, 500, 1000, 2000, 4000, 8000], "levels": [20, 25, 30, 40, 50, 60, 70]},
    "right": {"freqs": [125, 250, 500, 1000, 2000, 4000, 8000], "levels": [30, 35, 40, 50, 60, 70, 80]},
    "tmtf_left": {"L_ps": -17.0, "F_c": 64.0},
}


@pytest.fixture
def speech():
    return speech_like()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def babble():
    from modules.enhance import make_babble
    tokens = [speech_like(duration=0.6, f0=f0, lead=0.05, tail=0.05) for f0 in (100.0, 140.0, 180.0, 220.0)]
    return make_babble(tokens, int(1.5 * FS), n_talkers=6, seed=3)


@pytest.fixture
def nh_profile_path(tmp_path):
    return write_profile(tmp_path / "nh.json", NH_PROFILE)


@pytest.fixture
def hl_profile_path(tmp_path):
    return write_profile(tmp_path / "hl.json", HL_PROFILE)


@pytest.fixture
def wav_writer(tmp_path):
    def _write(name, data, fs=FS):
        path = tmp_path / name
        sf.write(str(path), np.asarray(data, dtype=np.float32), fs, subtype='FLOAT')
        return path
    return _write


def speech_suite() -> list:
    """Ten varied signals: speech-like voices, stationary and modulated noises, babble."""
    from scipy import signal
    from modules.enhance import make_babble

    rng = np.random.default_rng(7)
    n = int(round(1.5 * FS))
    t = np.arange(n) / FS

    def at_rms(x, rms=0.02):
        return x * rms / math.sqrt(np.mean(x ** 2))

    shaped = signal.lfilter([1.0], [1.0, -0.9], rng.normal(size=n))
    tokens = [speech_like(duration=0.5, f0=f0, lead=0.05, tail=0.05) for f0 in (110.0, 170.0, 230.0)]
    return [
        speech_like(f0=100.0, syllable_rate=3.0),
        speech_like(f0=120.0),
        speech_like(f0=160.0, syllable_rate=5.0, rms=0.05),
        speech_like(f0=210.0, rms=0.01),
        speech_like(f0=250.0, syllable_rate=4.5, lead=0.2, tail=0.1),
        speech_like(f0=140.0, duration=1.2),
        at_rms(rng.normal(size=n)),
        at_rms(rng.normal(size=n) * (1.0 + 0.8 * np.sin(2.0 * np.pi * 3.0 * t))),
        at_rms(shaped * np.sin(np.pi * 4.0 * t) ** 2),
        at_rms(make_babble(tokens, n, n_talkers=4, seed=11)),
    ]
