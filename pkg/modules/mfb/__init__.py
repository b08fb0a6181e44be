from .filters import (
    MFB_CENTER_FREQS, MfbConfig, ModulationFilterbank, TmtfGains,
    bandpass_coeffs, design_filterbank, frequency_response, tmtf_gains,
)
from .core import ModulationRepresentation, filter_epgram, envelope_rows, filter_envelopes

__all__ = [
    'MFB_CENTER_FREQS', 'MfbConfig', 'ModulationFilterbank', 'TmtfGains',
    'bandpass_coeffs', 'design_filterbank', 'frequency_response', 'tmtf_gains',
    'ModulationRepresentation', 'filter_epgram', 'envelope_rows', 'filter_envelopes',
]
