from .filterbank import (
    FRAME_SHIFT, FilterbankConfig, GammachirpBank,
    erb_number, erb_to_freq, erb_width, erb_space,
    peak_to_carrier, gammachirp_ir, envelope_scale, design_gammachirp_bank,
)
from .io_function import (
    NhCurve, ListenerSide, io_function, listener_side, normal_hearing_side, excitation_level,
)
from .core import CalibrationRef, EPgram, frame_bounds, channel_powers, analyze

__all__ = [
    'FRAME_SHIFT', 'FilterbankConfig', 'GammachirpBank',
    'erb_number', 'erb_to_freq', 'erb_width', 'erb_space',
    'peak_to_carrier', 'gammachirp_ir', 'envelope_scale', 'design_gammachirp_bank',
    'NhCurve', 'ListenerSide', 'io_function', 'listener_side', 'normal_hearing_side', 'excitation_level',
    'CalibrationRef', 'EPgram', 'frame_bounds', 'channel_powers', 'analyze',
]
