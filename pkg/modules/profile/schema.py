import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from utils import ValidationError, AudioIOError
from .audiogram import Audiogram, LEFT, RIGHT, EARS, pure_tone_average
from .tmtf import TmtfParams, NH_TMTF

DEFAULT_ALPHA = 0.5


@dataclass(frozen=True)
class HearingProfile:
    """Listener hearing characteristics for both ears."""
    left: Audiogram
    right: Audiogram
    alpha: float = DEFAULT_ALPHA
    tmtf_left: Optional[TmtfParams] = None
    tmtf_right: Optional[TmtfParams] = None
    listener_id: str = ""

    def __post_init__(self):
        if not math.isfinite(self.alpha) or not 0.0 <= self.alpha <= 1.0:
            raise ValidationError(f"alpha out of range: {self.alpha}")
        if self.left.ear != LEFT or self.right.ear != RIGHT:
            raise ValidationError("left/right audiograms are assigned to the wrong ear")

    def audiogram(self, ear: str) -> Audiogram:
        if ear not in EARS:
            raise ValidationError(f"unknown ear {ear!r}")
        return self.left if ear == LEFT else self.right

    def tmtf(self, ear: str) -> TmtfParams:
        """TMTF of an ear; NH defaults when it was not measured."""
        if ear not in EARS:
            raise ValidationError(f"unknown ear {ear!r}")
        params = self.tmtf_left if ear == LEFT else self.tmtf_right
        return params if params is not None else NH_TMTF


def normal_hearing_profile(listener_id: str = "NH", alpha: float = 1.0) -> HearingProfile:
    return HearingProfile(
        left=Audiogram.flat(0.0, LEFT),
        right=Audiogram.flat(0.0, RIGHT),
        alpha=alpha,
        listener_id=listener_id,
    )


def better_ear(profile: HearingProfile) -> str:
    """Ear with the lower mean HL over 500-4000 Hz; a tie goes to the left ear."""
    left = pure_tone_average(profile.left)
    right = pure_tone_average(profile.right)
    return RIGHT if right < left else LEFT


def _parse_audiogram(data: dict, ear: str) -> Audiogram:
    block = data.get(ear)
    if not isinstance(block, dict):
        raise ValidationError(f"'{ear}' audiogram missing or not an object")
    if "freqs" not in block or "levels" not in block:
        raise ValidationError(f"'{ear}' audiogram needs 'freqs' and 'levels'")
    try:
        return Audiogram(tuple(block["freqs"]), tuple(block["levels"]), ear)
    except (TypeError, ValueError) as e:
        if isinstance(e, ValidationError):
            raise
        raise ValidationError(f"'{ear}' audiogram: {e}")


def _parse_tmtf(data: dict, key: str) -> Optional[TmtfParams]:
    block = data.get(key)
    if block is None:
        return None
    if not isinstance(block, dict):
        raise ValidationError(f"'{key}' must be an object")
    try:
        l_ps = float(block.get("L_ps", NH_TMTF.l_ps))
        f_c = float(block.get("F_c", NH_TMTF.f_c))
    except (TypeError, ValueError):
        raise ValidationError(f"'{key}' values must be numbers")
    try:
        return TmtfParams(l_ps=l_ps, f_c=f_c)
    except ValidationError as e:
        raise ValidationError(f"'{key}': {e}")


def profile_from_dict(data: dict) -> HearingProfile:
    if not isinstance(data, dict):
        raise ValidationError("profile must be a JSON object")
    alpha = data.get("alpha", DEFAULT_ALPHA)
    if alpha is None:
        alpha = DEFAULT_ALPHA
    try:
        alpha = float(alpha)
    except (TypeError, ValueError):
        raise ValidationError(f"alpha must be a number, got {alpha!r}")
    return HearingProfile(
        left=_parse_audiogram(data, LEFT),
        right=_parse_audiogram(data, RIGHT),
        alpha=alpha,
        tmtf_left=_parse_tmtf(data, "tmtf_left"),
        tmtf_right=_parse_tmtf(data, "tmtf_right"),
        listener_id=str(data.get("listener_id", "")),
    )


def profile_to_dict(profile: HearingProfile) -> dict:
    data = {
        "listener_id": profile.listener_id,
        "alpha": profile.alpha,
        "left": {"freqs": list(profile.left.frequencies), "levels": list(profile.left.levels)},
        "right": {"freqs": list(profile.right.frequencies), "levels": list(profile.right.levels)},
    }
    for key, params in (("tmtf_left", profile.tmtf_left), ("tmtf_right", profile.tmtf_right)):
        if params is not None:
            data[key] = {"L_ps": params.l_ps, "F_c": params.f_c}
    return data


def load_profile(path) -> HearingProfile:
    """Read and validate a hearing-profile JSON file."""
    path = Path(path)
    try:
        with open(path, 'r') as f:
            data = json.load(f)
    except FileNotFoundError:
        raise AudioIOError(f"profile not found: {path}")
    except json.JSONDecodeError as e:
        raise ValidationError(f"profile {path} is not valid JSON: {e}")
    return profile_from_dict(data)


def save_profile(profile: HearingProfile, path):
    with open(path, 'w') as f:
        json.dump(profile_to_dict(profile), f, indent=2)
