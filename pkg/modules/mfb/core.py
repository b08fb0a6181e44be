from dataclasses import dataclass

import numpy as np
from scipy import signal

from utils import ValidationError
from modules.gcfb import EPgram
from .filters import ModulationFilterbank, MfbConfig

# Rows whose excursion stays below this share of their mean amplitude are treated as flat
FLAT_TOLERANCE = 1e-9


@dataclass
class ModulationRepresentation:
    """Modulation-band outputs m_ij(tau): series [channels x bands x frames]."""
    series: np.ndarray
    config: MfbConfig
    channel_freqs: np.ndarray

    @property
    def shape(self):
        return self.series.shape


def _check_bank(ep: EPgram, bank: ModulationFilterbank, gains) -> np.ndarray:
    gains = np.asarray(gains, dtype=float)
    n_bands = len(bank.coeffs)
    if gains.shape != (n_bands,):
        raise ValidationError(f"expected {n_bands} modulation gains, got shape {gains.shape}")
    if abs(ep.frame_shift * bank.config.frame_rate - 1.0) > 1e-9:
        raise ValidationError(
            f"EPgram frame rate {1.0 / ep.frame_shift:g} Hz does not match the "
            f"modulation filterbank rate {bank.config.frame_rate:g} Hz")
    return gains


def _filter_rows(rows: np.ndarray, bank: ModulationFilterbank, gains: np.ndarray) -> np.ndarray:
    series = np.empty((rows.shape[0], len(bank.coeffs), rows.shape[1]))
    for j, (b, a) in enumerate(bank.coeffs):
        series[:, j, :] = gains[j] * signal.lfilter(b, a, rows, axis=1)
    return series


def filter_epgram(ep: EPgram, bank: ModulationFilterbank, gains) -> ModulationRepresentation:
    """Run every EPgram row through every modulation band, scaled by that band's gain."""
    gains = _check_bank(ep, bank, gains)
    return ModulationRepresentation(series=_filter_rows(ep.levels, bank, gains),
                                    config=bank.config, channel_freqs=ep.channel_freqs)


def envelope_rows(ep: EPgram) -> np.ndarray:
    """EP amplitudes 10^(EP/20) per channel with each row's time mean removed.

    A level change of the input becomes a scale factor of the rows. Flat rows
    come back as exact zeros.
    """
    amp = 10.0 ** (ep.levels / 20.0)
    mean = amp.mean(axis=1, keepdims=True)
    rows = amp - mean
    flat = np.max(np.abs(rows), axis=1) <= FLAT_TOLERANCE * mean[:, 0]
    rows[flat] = 0.0
    return rows


def filter_envelopes(ep: EPgram, bank: ModulationFilterbank, gains) -> ModulationRepresentation:
    """filter_epgram applied to envelope_rows(ep); the input of the similarity stage."""
    gains = _check_bank(ep, bank, gains)
    return ModulationRepresentation(series=_filter_rows(envelope_rows(ep), bank, gains),
                                    config=bank.config, channel_freqs=ep.channel_freqs)
