from .audiogram import (
    Audiogram, HlSplit, LEFT, RIGHT, EARS,
    interpolate_hl, pure_tone_average, max_active_gain, apportion_hl,
)
from .tmtf import (
    TmtfParams, NH_TMTF,
    tmtf_cutoff_from_two_points, tmtf_beta_frequency, tmtf_curve, modulated_envelope,
)
from .schema import (
    HearingProfile, DEFAULT_ALPHA,
    normal_hearing_profile, better_ear,
    profile_from_dict, profile_to_dict, load_profile, save_profile,
)

__all__ = [
    'Audiogram', 'HlSplit', 'LEFT', 'RIGHT', 'EARS',
    'interpolate_hl', 'pure_tone_average', 'max_active_gain', 'apportion_hl',
    'TmtfParams', 'NH_TMTF',
    'tmtf_cutoff_from_two_points', 'tmtf_beta_frequency', 'tmtf_curve', 'modulated_envelope',
    'HearingProfile', 'DEFAULT_ALPHA',
    'normal_hearing_profile', 'better_ear',
    'profile_from_dict', 'profile_to_dict', 'load_profile', 'save_profile',
]
