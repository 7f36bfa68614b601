"""Empirical distributions, Kolmogorov-Smirnov tests and histogram binning."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import DomainError

__all__ = [
    "EmpiricalDistribution",
    "KsReport",
    "Histogram",
    "ecdf",
    "kolmogorov_sf",
    "ks_one_sample",
    "ks_two_sample",
    "histogram",
]

_KOLMOGOROV_TERMS = 100


@dataclass(frozen=True, eq=False)
class EmpiricalDistribution:
    sorted_samples: np.ndarray

    @classmethod
    def from_samples(cls, samples: Iterable[float]) -> "EmpiricalDistribution":
        arr = np.sort(np.asarray(list(samples) if not isinstance(samples, np.ndarray)
                                 else samples, dtype=float).ravel())
        if arr.size < 1:
            raise DomainError("need at least one sample")
        arr.setflags(write=False)
        return cls(arr)

    @property
    def n(self) -> int:
        return int(self.sorted_samples.size)

    def ecdf(self, t):
        return ecdf(self, t)


def ecdf(dist: EmpiricalDistribution, t):
    """Fraction of samples <= t."""
    counts = np.searchsorted(dist.sorted_samples, t, side="right")
    if np.ndim(counts) == 0:
        return int(counts) / dist.n
    return counts / dist.n


def kolmogorov_sf(x: float) -> float:
    """P[K > x] for the limiting Kolmogorov distribution.

    Uses the alternating series 2 sum (-1)^(j-1) exp(-2 j^2 x^2) for x >= 1
    and the Jacobi theta form of the CDF below that, 100 terms each.
    """
    if x <= 0.0:
        return 1.0
    if x < 1.0:
        s = 0.0
        for j in range(1, _KOLMOGOROV_TERMS + 1):
            s += math.exp(-((2 * j - 1) ** 2) * math.pi**2 / (8.0 * x * x))
        cdf = math.sqrt(2.0 * math.pi) / x * s
        return min(1.0, max(0.0, 1.0 - cdf))
    s = 0.0
    for j in range(1, _KOLMOGOROV_TERMS + 1):
        s += (-1) ** (j - 1) * math.exp(-2.0 * j * j * x * x)
    return min(1.0, max(0.0, 2.0 * s))


@dataclass(frozen=True)
class KsReport:
    test: str
    statistic: float
    n: float
    p_value_bound: float
    passed: bool

    def to_dict(self) -> dict:
        return asdict(self)


def _eval_cdf(cdf: Callable, x: np.ndarray) -> np.ndarray:
    try:
        values = np.asarray(cdf(x), dtype=float)
    except (TypeError, ValueError):
        values = None
    if values is None or values.shape != x.shape:
        values = np.array([cdf(float(v)) for v in x], dtype=float)
    return values


def ks_one_sample(dist: EmpiricalDistribution, cdf: Callable, alpha: float = 0.001,
                  test: str = "one-sample") -> KsReport:
    """Exact sup distance between the ECDF and ``cdf`` over the order statistics.

    ``cdf`` may be vectorised; otherwise it is called point by point.
    ``passed`` means the asymptotic p-value is at least ``alpha``.
    """
    x = dist.sorted_samples
    n = dist.n
    f = _eval_cdf(cdf, x)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - f)
    d_minus = np.max(f - (i - 1) / n)
    stat = float(min(1.0, max(d_plus, d_minus, 0.0)))
    p_value = kolmogorov_sf(math.sqrt(n) * stat)
    return KsReport(test, stat, n, p_value, p_value >= alpha)


def ks_two_sample(a: EmpiricalDistribution, b: EmpiricalDistribution, alpha: float = 0.001,
                  test: str = "two-sample") -> KsReport:
    """Sup distance between two ECDFs; effective size n_a n_b / (n_a + n_b)."""
    pooled = np.concatenate([a.sorted_samples, b.sorted_samples])
    fa = np.searchsorted(a.sorted_samples, pooled, side="right") / a.n
    fb = np.searchsorted(b.sorted_samples, pooled, side="right") / b.n
    stat = float(np.max(np.abs(fa - fb)))
    n_eff = a.n * b.n / (a.n + b.n)
    p_value = kolmogorov_sf(math.sqrt(n_eff) * stat)
    return KsReport(test, stat, n_eff, p_value, p_value >= alpha)


@dataclass(frozen=True, eq=False)
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    out_of_range: int

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def frequencies(self) -> np.ndarray:
        total = self.total
        return self.counts / total if total else np.zeros(self.counts.shape)

    def rows(self):
        """(bin_left, bin_right, count, frequency) per bin."""
        freq = self.frequencies
        for j in range(self.counts.size):
            yield float(self.edges[j]), float(self.edges[j + 1]), int(self.counts[j]), float(freq[j])


def histogram(dist: EmpiricalDistribution, bins: int, lo: float, hi: float) -> Histogram:
    """Equal-width, left-closed bins on [lo, hi]; a sample equal to hi joins the last bin."""
    if bins < 1:
        raise DomainError(f"bins must be >= 1, got {bins}")
    if not lo < hi:
        raise DomainError(f"need lo < hi, got [{lo}, {hi}]")
    edges = np.linspace(lo, hi, bins + 1)
    x = dist.sorted_samples
    inside = (x >= lo) & (x <= hi)
    idx = np.searchsorted(edges, x[inside], side="right") - 1
    idx = np.minimum(idx, bins - 1)
    counts = np.bincount(idx, minlength=bins)
    return Histogram(edges, counts, int(x.size - inside.sum()))
