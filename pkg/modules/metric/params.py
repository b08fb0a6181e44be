import math
from dataclasses import dataclass

from utils import ValidationError
from modules.mfb import MFB_CENTER_FREQS

T_MA = 0.030  # seconds, per-channel alignment window


@dataclass(frozen=True)
class GesiParams:
    rho: float = 0.55
    eta: float = 0.7
    h_max: float = 5.0
    t_ma: float = T_MA
    i_max: float = 85.0
    unit_weight_mode: bool = False
    use_tmtf: bool = True
    w_j: tuple = tuple(1.0 for _ in MFB_CENTER_FREQS)
    f0_epsilon: float = 1e-4

    def __post_init__(self):
        object.__setattr__(self, "w_j", tuple(float(w) for w in self.w_j))
        if not 0.0 <= self.rho <= 1.0:
            raise ValidationError(f"rho out of range: {self.rho}")
        if not 0.0 <= self.eta <= 1.0:
            raise ValidationError(f"eta out of range: {self.eta}")
        if not self.h_max > 0:
            raise ValidationError(f"h_max must be positive, got {self.h_max}")
        if self.t_ma != T_MA:
            raise ValidationError(f"t_ma is fixed at {T_MA} s, got {self.t_ma}")
        if not self.i_max > 0:
            raise ValidationError(f"i_max must be positive, got {self.i_max}")
        if len(self.w_j) != len(MFB_CENTER_FREQS):
            raise ValidationError(f"w_j needs {len(MFB_CENTER_FREQS)} values, got {len(self.w_j)}")
        if not self.f0_epsilon > 0:
            raise ValidationError(f"f0_epsilon must be positive, got {self.f0_epsilon}")

    @classmethod
    def from_config(cls, section: dict, **overrides) -> "GesiParams":
        """Build from the 'gesi' section of the YAML config; None overrides are ignored."""
        values = {
            "rho": section.get("rho", 0.55),
            "eta": section.get("eta", 0.7),
            "h_max": section.get("h_max", 5.0),
            "i_max": section.get("i_max", 85.0),
            "use_tmtf": section.get("use_tmtf", True),
            "w_j": tuple(section.get("mfb_weights") or (1.0,) * len(MFB_CENTER_FREQS)),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass(frozen=True)
class SigmoidFit:
    a: float
    b: float
    residual_rms: float = 0.0
    flat: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValidationError(f"sigmoid parameters must be finite, got a={self.a}, b={self.b}")
