from .metric import register_command
from .params import T_MA, GesiParams, SigmoidFit
from .align import (
    GLOBAL_MAX_LAG, MIN_GLOBAL_CORRELATION, ChannelAlignment,
    global_xcorr_peak, global_align, apply_lag, align_epgram_channels,
)
from .f0 import F0Track, estimate_f0, load_f0_track, n_epgram_frames
from .weights import EfficiencyWeight, ssi_weight, efficiency_weight
from .similarity import similarity, aggregate, zero_energy_cells
from .sigmoid import sigmoid_map, fit_sigmoid
from .core import (
    GesiDiagnostics, GesiResult, RESULT_FIELDS,
    compute_gesi, result_to_row, write_diagnostics,
)

__all__ = [
    'register_command',
    'T_MA', 'GesiParams', 'SigmoidFit',
    'GLOBAL_MAX_LAG', 'MIN_GLOBAL_CORRELATION', 'ChannelAlignment',
    'global_xcorr_peak', 'global_align', 'apply_lag', 'align_epgram_channels',
    'F0Track', 'estimate_f0', 'load_f0_track', 'n_epgram_frames',
    'EfficiencyWeight', 'ssi_weight', 'efficiency_weight',
    'similarity', 'aggregate', 'zero_energy_cells',
    'sigmoid_map', 'fit_sigmoid',
    'GesiDiagnostics', 'GesiResult', 'RESULT_FIELDS',
    'compute_gesi', 'result_to_row', 'write_diagnostics',
]
