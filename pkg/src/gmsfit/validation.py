"""Cross-checks between the exact law, the full simulator and the shortcut sampler."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from .excursion import ExcursionRecord, sample_shortcut, tau_pmf_table
from .fitness_law import ModelParams, cdf
from .gms_sim import SimConfig, run_full_simulation
from .stats import EmpiricalDistribution, KsReport, ks_one_sample, ks_two_sample

__all__ = [
    "ChiSquareReport",
    "strongest_sample",
    "length_chi_square_vs_pmf",
    "length_chi_square_two_sample",
    "validate",
]

_MIN_EXPECTED = 5.0


@dataclass(frozen=True)
class ChiSquareReport:
    test: str
    statistic: float
    dof: int
    p_value: float
    passed: bool


def strongest_sample(records: list[ExcursionRecord]) -> EmpiricalDistribution:
    return EmpiricalDistribution.from_samples(np.fromiter(
        (r.strongest_fitness for r in records), dtype=float, count=len(records)))


def length_chi_square_vs_pmf(records: list[ExcursionRecord], params: ModelParams,
                             alpha: float = 0.001) -> ChiSquareReport:
    """Goodness of fit of observed excursion lengths to the exact pmf.

    Lengths are binned shortest first while each bin expects at least 5
    counts; everything longer goes to one tail bin.
    """
    n = len(records)
    lengths = np.array([r.length for r in records])
    k_max = max(params.m, int(lengths.max()) - 1)
    table = tau_pmf_table(params, k_max).entries
    observed, expected = [], []
    covered = 0.0
    for entry in table:
        e = n * entry.probability
        if e < _MIN_EXPECTED:
            break
        observed.append(int(np.count_nonzero(lengths == entry.length)))
        expected.append(e)
        covered += entry.probability
    tail_expected = n * (1.0 - covered)
    tail_observed = n - sum(observed)
    if tail_expected >= _MIN_EXPECTED or not expected:
        observed.append(tail_observed)
        expected.append(tail_expected)
    else:
        observed[-1] += tail_observed
        expected[-1] += tail_expected
    res = sps.chisquare(observed, expected)
    return ChiSquareReport("length-vs-pmf", float(res.statistic), len(observed) - 1,
                           float(res.pvalue), float(res.pvalue) >= alpha)


def length_chi_square_two_sample(a: list[ExcursionRecord], b: list[ExcursionRecord],
                                 alpha: float = 0.001) -> ChiSquareReport:
    """Homogeneity test of two excursion-length samples."""
    la = np.array([r.length for r in a])
    lb = np.array([r.length for r in b])
    values, inverse = np.unique(np.concatenate([la, lb]), return_inverse=True)
    ca = np.bincount(inverse[:la.size], minlength=values.size)
    cb = np.bincount(inverse[la.size:], minlength=values.size)
    frac_a = la.size / (la.size + lb.size)
    frac_b = 1.0 - frac_a
    rows_a, rows_b = [], []
    acc_a = acc_b = 0
    for x, y in zip(ca, cb):
        acc_a += x
        acc_b += y
        pooled = acc_a + acc_b
        if pooled * min(frac_a, frac_b) >= _MIN_EXPECTED:
            rows_a.append(acc_a)
            rows_b.append(acc_b)
            acc_a = acc_b = 0
    if acc_a or acc_b:
        if rows_a:
            rows_a[-1] += acc_a
            rows_b[-1] += acc_b
        else:
            rows_a.append(acc_a)
            rows_b.append(acc_b)
    if len(rows_a) < 2:
        return ChiSquareReport("length-two-sample", 0.0, 0, 1.0, True)
    res = sps.chi2_contingency(np.array([rows_a, rows_b]), correction=False)
    return ChiSquareReport("length-two-sample", float(res.statistic), int(res.dof),
                           float(res.pvalue), float(res.pvalue) >= alpha)


def _corrupted_cdf(params: ModelParams):
    # Negative control: the law of Z_{m+1} in place of Z_m.
    wrong = ModelParams(params.p, params.m + 1)
    return lambda t: cdf(wrong, t)


def validate(params: ModelParams, n_excursions: int, seed: int, alpha: float = 0.001,
             workers: int = 1, corrupt_cdf: bool = False) -> list[KsReport]:
    """Full-vs-exact, shortcut-vs-exact and full-vs-shortcut KS reports."""
    full = run_full_simulation(SimConfig(params, seed=seed, n_excursions=n_excursions,
                                         workers=workers))
    short = sample_shortcut(params, n_excursions, seed=seed, workers=workers)
    exact = _corrupted_cdf(params) if corrupt_cdf else (lambda t: cdf(params, t))
    full_dist = strongest_sample(full)
    short_dist = strongest_sample(short)
    return [
        ks_one_sample(full_dist, exact, alpha, test="full-vs-exact"),
        ks_one_sample(short_dist, exact, alpha, test="shortcut-vs-exact"),
        ks_two_sample(full_dist, short_dist, alpha, test="full-vs-shortcut"),
    ]
