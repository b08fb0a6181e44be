"""Two-point TMTF model: a first-order low-pass in modulation frequency."""
import math
from dataclasses import dataclass

import numpy as np

from utils import ValidationError


@dataclass(frozen=True)
class TmtfParams:
    l_ps: float  # modulation-depth threshold at low modulation frequency, dB
    f_c: float   # low-pass cutoff, Hz

    def __post_init__(self):
        if not math.isfinite(self.l_ps) or self.l_ps >= 0:
            raise ValidationError(f"L_ps must be negative and finite, got {self.l_ps}")
        if not math.isfinite(self.f_c) or self.f_c <= 0:
            raise ValidationError(f"F_c must be positive and finite, got {self.f_c}")


# Average normal-hearing listener
NH_TMTF = TmtfParams(l_ps=-23.0, f_c=128.0)


def tmtf_cutoff_from_two_points(l_ps: float, f_beta: float) -> float:
    """Cutoff F_c from the threshold L_ps and the frequency F_beta measured at L_ps/2."""
    if l_ps >= 0:
        raise ValidationError(f"L_ps must be negative, got {l_ps}")
    if f_beta <= 0:
        raise ValidationError(f"F_beta must be positive, got {f_beta}")
    return f_beta / math.sqrt(10.0 ** (-l_ps / 20.0) - 1.0)


def tmtf_beta_frequency(params: TmtfParams) -> float:
    """Modulation frequency where the TMTF reaches L_ps/2 (inverse of the two-point cutoff)."""
    return params.f_c * math.sqrt(10.0 ** (-params.l_ps / 20.0) - 1.0)


def tmtf_curve(params: TmtfParams, f_m):
    """TMTF threshold in dB at modulation frequency f_m."""
    f_m = np.asarray(f_m, dtype=float)
    if np.any(f_m < 0):
        raise ValidationError("modulation frequency must be >= 0")
    value = params.l_ps + 10.0 * np.log10(1.0 + (f_m / params.f_c) ** 2)
    return float(value) if value.ndim == 0 else value


def modulated_envelope(m: float, f_m: float, t):
    """Sinusoidally modulated envelope with level kept constant over depth m."""
    if not 0.0 <= m <= 1.0:
        raise ValidationError(f"modulation depth must be within [0, 1], got {m}")
    t = np.asarray(t, dtype=float)
    a0 = 1.0 / math.sqrt(1.0 + m ** 2 / 2.0)
    value = a0 * (1.0 + m * np.sin(2.0 * np.pi * f_m * t))
    return float(value) if value.ndim == 0 else value
