import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from utils import ValidationError, warn
from modules.profile import HearingProfile, NH_TMTF, better_ear
from modules.gcfb import (
    CalibrationRef, FilterbankConfig, analyze, listener_side, normal_hearing_side,
    design_gammachirp_bank,
)
from modules.mfb import MfbConfig, design_filterbank, filter_envelopes, tmtf_gains
from .params import GesiParams, SigmoidFit
from .align import MIN_GLOBAL_CORRELATION, global_xcorr_peak, apply_lag, align_epgram_channels
from .f0 import F0Track, estimate_f0
from .weights import ssi_weight, efficiency_weight
from .similarity import similarity, aggregate, zero_energy_cells
from .sigmoid import sigmoid_map


@dataclass
class GesiDiagnostics:
    ear: str
    global_lag: int
    global_peak: float
    channel_shifts: np.ndarray
    efficiency_weights: np.ndarray
    n_audible: int
    inaudible: bool
    zero_energy_cells: int
    a_ref: np.ndarray
    a_test: np.ndarray
    channel_freqs: np.ndarray

    @property
    def mean_shift(self) -> float:
        return float(np.mean(self.channel_shifts))


@dataclass
class GesiResult:
    s_matrix: np.ndarray
    d: float
    intelligibility: Optional[float] = None
    diagnostics: Optional[GesiDiagnostics] = field(default=None, repr=False)


def _mono(x, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValidationError(f"{name} must be a mono waveform, got shape {x.shape}")
    if x.size == 0:
        raise ValidationError(f"{name} signal is empty")
    return x


def compute_gesi(ref, test, sample_rate: int, profile: HearingProfile,
                 params: GesiParams = GesiParams(), calib: CalibrationRef = CalibrationRef(),
                 fb_config: FilterbankConfig = None, f0: F0Track = None, ear: str = None,
                 fit: SigmoidFit = None) -> GesiResult:
    """Score a test signal against its reference for one listener.

    The reference is analyzed with NH parameters, the test with the
    listener's ear (the better ear unless `ear` is given). The test is
    shifted by the global lag only when the waveform correlation peak reaches
    MIN_GLOBAL_CORRELATION. The modulation filterbank runs on the
    mean-removed EP amplitudes of both EPgrams.
    """
    ref = _mono(ref, "reference")
    test = _mono(test, "test")
    if fb_config is None:
        fb_config = FilterbankConfig(sample_rate=sample_rate)
    elif fb_config.sample_rate != sample_rate:
        raise ValidationError(
            f"sample rate {sample_rate} Hz does not match filterbank sample rate {fb_config.sample_rate} Hz")
    if ear is None:
        ear = better_ear(profile)

    lag, peak = global_xcorr_peak(ref, test, sample_rate)
    if peak < MIN_GLOBAL_CORRELATION:
        lag = 0
    test = apply_lag(test, lag, ref.size)

    freqs = design_gammachirp_bank(fb_config).channel_freqs
    ep_ref = analyze(ref, sample_rate, normal_hearing_side(freqs), fb_config, calib)
    side = listener_side(profile.audiogram(ear), profile.alpha, freqs)
    ep_test = analyze(test, sample_rate, side, fb_config, calib)

    eff = efficiency_weight(ep_test, params.eta)
    alignment = align_epgram_channels(ep_ref, ep_test, params.t_ma)

    mfb_config = MfbConfig()
    bank = design_filterbank(mfb_config)
    gains = tmtf_gains(NH_TMTF, profile.tmtf(ear), mfb_config, use_tmtf=params.use_tmtf)
    m_ref = filter_envelopes(ep_ref, bank, gains.a_ref)
    m_test = filter_envelopes(alignment.ep, bank, gains.a_test)

    if params.unit_weight_mode:
        weights = np.ones((ep_ref.n_channels, ep_ref.n_frames))
    else:
        if f0 is None:
            f0 = estimate_f0(ref, sample_rate, params.f0_epsilon, n_frames=ep_ref.n_frames)
        elif f0.values.size != ep_ref.n_frames:
            raise ValidationError(
                f"F0 track has {f0.values.size} frames, EPgram has {ep_ref.n_frames}")
        weights = ssi_weight(f0, freqs, params.h_max) * eff.weights[:, None]

    s_matrix = similarity(m_ref, m_test, weights, params.rho)
    n_zero = int(zero_energy_cells(m_ref, m_test).sum())
    if n_zero:
        warn(f"{n_zero} modulation cells carry no energy and score 0")
    d = aggregate(s_matrix, params.w_j)

    diagnostics = GesiDiagnostics(
        ear=ear,
        global_lag=lag,
        global_peak=peak,
        channel_shifts=alignment.shifts,
        efficiency_weights=eff.weights,
        n_audible=eff.n_audible,
        inaudible=eff.inaudible,
        zero_energy_cells=n_zero,
        a_ref=gains.a_ref,
        a_test=gains.a_test,
        channel_freqs=freqs,
    )
    intelligibility = sigmoid_map(d, fit, params.i_max) if fit is not None else None
    return GesiResult(s_matrix=s_matrix, d=d, intelligibility=intelligibility, diagnostics=diagnostics)


RESULT_FIELDS = ['listener_id', 'condition', 'd', 'I', 'N_AT', 'mean_shift']


def result_to_row(result: GesiResult, listener_id: str = "", condition: str = "") -> dict:
    diag = result.diagnostics
    return {
        'listener_id': listener_id,
        'condition': condition,
        'd': result.d,
        'I': "" if result.intelligibility is None else result.intelligibility,
        'N_AT': diag.n_audible if diag else "",
        'mean_shift': diag.mean_shift if diag else "",
    }


def write_diagnostics(result: GesiResult, path):
    """Dump the similarity matrix and per-channel diagnostics as JSON."""
    diag = result.diagnostics
    data = {
        'd': result.d,
        'intelligibility': result.intelligibility,
        's_matrix': result.s_matrix.tolist(),
    }
    if diag is not None:
        data.update({
            'ear': diag.ear,
            'global_lag': diag.global_lag,
            'global_peak': diag.global_peak,
            'channel_freqs': diag.channel_freqs.tolist(),
            'channel_shifts': diag.channel_shifts.tolist(),
            'efficiency_weights': diag.efficiency_weights.tolist(),
            'n_audible': diag.n_audible,
            'inaudible': diag.inaudible,
            'zero_energy_cells': diag.zero_energy_cells,
            'a_ref': diag.a_ref.tolist(),
            'a_test': diag.a_test.tolist(),
        })
    with open(path, 'w') as f:
        json.dump(data, f, indent=2)
