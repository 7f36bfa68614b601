"""
Exact law of Z_m, the fitness of the strongest individual in one excursion of
the subcritical GMS(m) model.

    P[Z_m <= t] = (q t)^m 2F1(m/2, (m+1)/2; m+1; 4pqt)
    f_m(t)      = m q^m t^(m-1) 2F1(m/2, (m+1)/2; m; 4pqt)
    E[Z_m]      = 1 - q^m / (m+1) * 2F1(m/2, (m+1)/2; m+2; 4pq)

At p = 1/2, 1 - Z_m follows the hypergeometric function type I distribution,
Z_1 is Beta(1, 1/2), and E[Z_m] = 1 - 2/((m+1)(m+2)).

``cdf`` and ``pdf`` accept either a float or an array of points.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError
from .hypergeom import DEFAULT_CONTROL, SeriesControl, hyp2f1, hyp2f1_array

__all__ = ["ModelParams", "cdf", "cdf_closed_m1", "pdf", "mean", "mean_half"]

# Probabilities outside [0, 1] by more than this indicate a bug, not rounding.
_CLAMP_SLACK = 1e-9


@dataclass(frozen=True)
class ModelParams:
    """Birth probability ``p`` and revival batch size ``m``."""

    p: float
    m: int = 1

    def __post_init__(self):
        if not (0.0 < self.p <= 0.5):
            raise DomainError(f"p must satisfy 0 < p <= 0.5, got p={self.p}")
        if isinstance(self.m, bool) or int(self.m) != self.m or self.m < 1:
            raise DomainError(f"m must be an integer >= 1, got m={self.m}")
        object.__setattr__(self, "m", int(self.m))

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @property
    def z_scale(self) -> float:
        """4pq, the 2F1 argument at t = 1."""
        return 4.0 * self.p * self.q


def _clamp(value):
    arr = np.asarray(value, dtype=float)
    if np.any(arr < -_CLAMP_SLACK) or np.any(arr > 1.0 + _CLAMP_SLACK):
        worst = arr[(arr < -_CLAMP_SLACK) | (arr > 1.0 + _CLAMP_SLACK)]
        raise NumericalError(f"probability outside [0, 1]: {worst[:5]}")
    out = np.clip(arr, 0.0, 1.0)
    return float(out) if np.ndim(value) == 0 else out


def _check_t(t, lo_open: bool, hi_open: bool):
    arr = np.asarray(t, dtype=float)
    lo_bad = arr <= 0.0 if lo_open else arr < 0.0
    hi_bad = arr >= 1.0 if hi_open else arr > 1.0
    if np.any(lo_bad | hi_bad | ~np.isfinite(arr)):
        lo = "(0" if lo_open else "[0"
        hi = "1)" if hi_open else "1]"
        raise DomainError(f"t must lie in {lo}, {hi}")


def cdf(params: ModelParams, t, ctrl: SeriesControl = DEFAULT_CONTROL):
    """P[Z_m <= t] for 0 <= t <= 1 (t = 1 is the closure of the domain)."""
    _check_t(t, lo_open=False, hi_open=False)
    m, q = params.m, params.q
    a, b, c = m / 2.0, (m + 1) / 2.0, m + 1.0
    if np.ndim(t) == 0:
        t = float(t)
        if t == 0.0:
            return 0.0
        value = (q * t) ** m * hyp2f1(a, b, c, params.z_scale * t, ctrl)
        return _clamp(value)
    t = np.asarray(t, dtype=float)
    value = np.zeros_like(t)
    pos = t > 0.0
    tp = t[pos]
    value[pos] = (q * tp) ** m * hyp2f1_array(a, b, c, params.z_scale * tp, ctrl)
    return _clamp(value)


def cdf_closed_m1(p: float, t: float) -> float:
    """Closed form of the m = 1 law, (1 - sqrt(1 - 4pqt)) / (2p).

    Evaluated as 2qt / (1 + sqrt(1 - 4pqt)) to avoid cancellation at small t.
    At p = 1/2 this is the Beta(1, 1/2) CDF 1 - sqrt(1 - t).
    """
    if not (0.0 < p <= 0.5):
        raise DomainError(f"p must satisfy 0 < p <= 0.5, got p={p}")
    if not (0.0 <= t <= 1.0):
        raise DomainError(f"t must lie in [0, 1], got t={t}")
    q = 1.0 - p
    return 2.0 * q * t / (1.0 + math.sqrt(1.0 - 4.0 * p * q * t))


def pdf(params: ModelParams, t, ctrl: SeriesControl = DEFAULT_CONTROL):
    """Density of Z_m on the open interval (0, 1)."""
    _check_t(t, lo_open=True, hi_open=True)
    m, q = params.m, params.q
    a, b, c = m / 2.0, (m + 1) / 2.0, float(m)
    scale = m * q**m
    if np.ndim(t) == 0:
        t = float(t)
        return scale * t ** (m - 1) * hyp2f1(a, b, c, params.z_scale * t, ctrl)
    t = np.asarray(t, dtype=float)
    return scale * t ** (m - 1) * hyp2f1_array(a, b, c, params.z_scale * t, ctrl)


def mean(params: ModelParams, ctrl: SeriesControl = DEFAULT_CONTROL) -> float:
    """E[Z_m] = integral of the survival function over [0, 1]."""
    m, q = params.m, params.q
    f = hyp2f1(m / 2.0, (m + 1) / 2.0, m + 2.0, params.z_scale, ctrl)
    return 1.0 - q**m / (m + 1) * f


def mean_half(m: int) -> float:
    """E[Z_m] at p = 1/2: 1 - 2/((m+1)(m+2))."""
    if int(m) != m or m < 1:
        raise DomainError(f"m must be an integer >= 1, got m={m}")
    return 1.0 - 2.0 / ((m + 1) * (m + 2))
