"""Sigmoid mapping from the metric d to percent correct, and its least-squares fit."""
import math

import numpy as np
from scipy.optimize import least_squares
from scipy.special import expit

from utils import ValidationError, warn
from .params import SigmoidFit

# Coarse grid over the slope (in units of the d span) and the midpoint
GRID_SLOPES = np.concatenate([-np.logspace(-1, 2.5, 36), np.logspace(-1, 2.5, 36)])
GRID_MIDPOINTS = 41


def sigmoid_map(d, fit: SigmoidFit, i_max: float):
    """I = i_max / (1 + exp(a*d + b))."""
    value = i_max * expit(-(fit.a * np.asarray(d, dtype=float) + fit.b))
    return float(value) if np.ndim(value) == 0 else value


def _flat_fit(d: np.ndarray, y: np.ndarray, i_max: float) -> SigmoidFit:
    level = float(np.clip(y[0], i_max * 1e-6, i_max * (1.0 - 1e-6)))
    b = math.log(i_max / level - 1.0)
    fit = SigmoidFit(a=0.0, b=b, flat=True)
    residual = sigmoid_map(d, fit, i_max) - y
    warn(f"subjective scores are flat ({y[0]:g}%); returning the a=0 sigmoid")
    return SigmoidFit(a=0.0, b=b, residual_rms=float(np.sqrt(np.mean(residual ** 2))), flat=True)


def fit_sigmoid(pairs, i_max: float) -> SigmoidFit:
    """Least-squares (a, b) for I = i_max/(1 + exp(a*d + b)) over (d_mean, I_subj) pairs.

    A coarse grid seeds a Levenberg-Marquardt refinement. Parameters are
    solved on a centred, span-normalized d axis so the grid covers any
    metric scale.
    """
    pairs = list(pairs)
    if len(pairs) < 2:
        raise ValidationError(f"fit_sigmoid needs at least 2 pairs, got {len(pairs)}")
    d = np.array([p[0] for p in pairs], dtype=float)
    y = np.array([p[1] for p in pairs], dtype=float)
    if not (np.all(np.isfinite(d)) and np.all(np.isfinite(y))):
        raise ValidationError("fit_sigmoid pairs must be finite")
    span = float(np.ptp(d))
    if span == 0:
        raise ValidationError("fit_sigmoid needs distinct d values (all pairs share one d)")
    if np.ptp(y) == 0:
        return _flat_fit(d, y, i_max)

    centre = float(np.mean(d))
    u = (d - centre) / span

    def residuals(x):
        return i_max * expit(-(x[0] * u + x[1])) - y

    best, best_cost = None, np.inf
    for k in GRID_SLOPES:
        for c in np.linspace(u.min() - 1.0, u.max() + 1.0, GRID_MIDPOINTS):
            x = np.array([k, -k * c])
            cost = np.sum(residuals(x) ** 2)
            if cost < best_cost:
                best, best_cost = x, cost

    result = least_squares(residuals, best, method='lm', xtol=1e-14, ftol=1e-14, gtol=1e-14)
    k, b_u = result.x
    a = k / span
    b = b_u - k * centre / span
    rms = float(np.sqrt(np.mean(result.fun ** 2)))
    return SigmoidFit(a=float(a), b=float(b), residual_rms=rms)
