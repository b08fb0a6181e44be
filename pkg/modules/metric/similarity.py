"""Extended cosine similarity between reference and test modulation outputs."""
import numpy as np

from utils import ValidationError


def _as_series(m):
    return np.asarray(getattr(m, "series", m), dtype=float)


def zero_energy_cells(m_ref, m_test) -> np.ndarray:
    """Mask [N x M] of cells where either side carries no energy."""
    r = _as_series(m_ref)
    t = _as_series(m_test)
    return (np.sum(r ** 2, axis=2) == 0) | (np.sum(t ** 2, axis=2) == 0)


def similarity(m_ref, m_test, w, rho: float) -> np.ndarray:
    """S_ij = sum w m_r m_t / ((sum m_r^2)^rho (sum m_t^2)^(1-rho)).

    w is a per-channel, per-frame weight [N x frames] shared by all modulation
    bands. Cells with zero energy on either side score 0.
    """
    r = _as_series(m_ref)
    t = _as_series(m_test)
    if r.shape != t.shape or r.ndim != 3:
        raise ValidationError(f"modulation outputs differ in shape: {r.shape} vs {t.shape}")
    if not 0.0 <= rho <= 1.0:
        raise ValidationError(f"rho out of range: {rho}")
    n, _, frames = r.shape
    w = np.asarray(w, dtype=float)
    if w.ndim == 1 and w.size == n:
        w = w[:, None]
    try:
        w = np.broadcast_to(w, (n, frames))
    except ValueError:
        raise ValidationError(f"weight shape {w.shape} does not match {(n, frames)}")

    num = np.einsum('it,ijt,ijt->ij', w, r, t)
    e_ref = np.sum(r ** 2, axis=2)
    e_test = np.sum(t ** 2, axis=2)
    s = np.zeros(num.shape)
    ok = (e_ref > 0) & (e_test > 0)
    s[ok] = num[ok] / (e_ref[ok] ** rho * e_test[ok] ** (1.0 - rho))
    return s


def aggregate(s_matrix, w_j) -> float:
    """d = (1/(M N)) sum_i sum_j w_j S_ij."""
    s = np.asarray(s_matrix, dtype=float)
    w_j = np.asarray(w_j, dtype=float)
    if s.ndim != 2 or w_j.shape != (s.shape[1],):
        raise ValidationError(f"w_j needs {s.shape[1] if s.ndim == 2 else '?'} values, got {w_j.shape}")
    return float(np.sum(s * w_j[None, :]) / s.size)
