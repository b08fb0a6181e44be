from .enhance import register_command
from .stft import StftConfig, stft, istft
from .irm import (
    MASK_MAGIC, ideal_ratio_mask, enhance_irm, enhance_irm_with_mask, save_mask, load_mask,
)
from .mixing import (
    MixtureSpec, MixedCondition, active_mask, mix_condition, measured_snr, make_babble,
)
from .resample import SUPPORTED_RATES, anti_alias_filter, resample

__all__ = [
    'register_command',
    'StftConfig', 'stft', 'istft',
    'MASK_MAGIC', 'ideal_ratio_mask', 'enhance_irm', 'enhance_irm_with_mask', 'save_mask', 'load_mask',
    'MixtureSpec', 'MixedCondition', 'active_mask', 'mix_condition', 'measured_snr', 'make_babble',
    'SUPPORTED_RATES', 'anti_alias_filter', 'resample',
]
