"""
Excursion-length law and the shortcut excursion sampler.

An excursion starts with the step that places the m revival individuals and
ends with the step that empties the system. After placement the population
performs a +/-1 walk from level m, so with k = T_{-m} (first passage of a
walk from 0 to -m) the excursion length is tau = k + 1 and

    P[tau = k + 1] = (m/k) C(k, (k-m)/2) p^((k-m)/2) q^((k+m)/2),  k >= m, k+m even.

Idle steps of the empty system (probability 1 - p each) belong to no
excursion.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, RuntimeLimit
from .fitness_law import ModelParams

__all__ = [
    "ExcursionRecord",
    "TauPmfEntry",
    "TauPmfTable",
    "STEP_CAP",
    "tau_pmf",
    "tau_pmf_table",
    "adaptive_cutoff",
    "sample_excursion_shortcut",
    "sample_shortcut",
    "chunk_rng",
]

STEP_CAP = 1_000_000_000
# Excursions per RNG stream. Part of the stream layout, so changing it
# changes every seeded result.
CHUNK_SIZE = 512
SHORTCUT_STREAM = 1


@dataclass(frozen=True, slots=True)
class ExcursionRecord:
    length: int
    births: int
    deaths: int
    strongest_fitness: float

    @property
    def k(self) -> int:
        """Walk steps after the revival step (tau - 1)."""
        return self.length - 1


@dataclass(frozen=True, slots=True)
class TauPmfEntry:
    length: int
    probability: float


@dataclass(frozen=True)
class TauPmfTable:
    entries: list[TauPmfEntry]

    @property
    def mass(self) -> float:
        return math.fsum(e.probability for e in self.entries)

    def cumulative(self) -> list[float]:
        out = []
        acc = 0.0
        for e in self.entries:
            acc += e.probability
            out.append(acc)
        return out


def _log_tau_pmf(p: float, q: float, m: int, k: int) -> float:
    j = (k - m) // 2
    log_binom = math.lgamma(k + 1) - math.lgamma(j + 1) - math.lgamma(k - j + 1)
    return math.log(m / k) + log_binom + j * math.log(p) + (k - j) * math.log(q)


def tau_pmf(params: ModelParams, k: int) -> float:
    """P[tau = k + 1] = P[T_{-m} = k]."""
    m = params.m
    if k < m:
        raise DomainError(f"k must be >= m={m}, got k={k}")
    if (k + m) % 2:
        return 0.0
    return math.exp(_log_tau_pmf(params.p, params.q, m, k))


def _pmf_vector(params: ModelParams, ks: np.ndarray) -> np.ndarray:
    m = params.m
    j = (ks - m) // 2
    log_pmf = (np.log(m / ks) + gammaln(ks + 1) - gammaln(j + 1) - gammaln(ks - j + 1)
               + j * math.log(params.p) + (ks - j) * math.log(params.q))
    return np.exp(log_pmf)


def tau_pmf_table(params: ModelParams, k_max: int) -> TauPmfTable:
    """Every admissible excursion length with k <= k_max, shortest first."""
    m = params.m
    if k_max < m:
        raise DomainError(f"k_max must be >= m={m}, got {k_max}")
    ks = np.arange(m, k_max + 1, 2, dtype=np.int64)
    probs = _pmf_vector(params, ks.astype(float))
    return TauPmfTable([TauPmfEntry(int(k) + 1, float(pr)) for k, pr in zip(ks, probs)])


def adaptive_cutoff(params: ModelParams, tail_tol: float = 1e-7) -> int:
    """Smallest admissible k at which a geometric bound on the remaining mass is below tail_tol.

    Consecutive admissible terms have ratio 4pq * k(k+1)/((k+2)^2 - m^2),
    which is at most 4pq once k >= m^2/3. Needs p < 1/2.
    """
    if params.p >= 0.5:
        raise DomainError("tail is not geometric at p = 1/2")
    m = params.m
    rho0 = params.z_scale
    k = m
    while True:
        factor = k * (k + 1) / ((k + 2) ** 2 - m * m)
        rho = rho0 * max(1.0, factor)
        if rho < 1.0 and 3 * k >= m * m - 4:
            tail = tau_pmf(params, k) * rho / (1.0 - rho)
            if tail < tail_tol:
                return k
        k += 2


def chunk_rng(seed: int, stream: int, chunk: int) -> np.random.Generator:
    """Generator for one chunk of excursion ordinals."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, chunk)))


def _first_passage(p: float, m: int, rng: np.random.Generator, cap: int) -> int:
    # Walk from level m until it first hits 0; returns the number of steps.
    pos = m
    steps = 0
    block = 64
    while True:
        moves = np.where(rng.random(block) < p, 1, -1)
        path = pos + np.cumsum(moves)
        hit = np.flatnonzero(path == 0)
        if hit.size:
            steps += int(hit[0]) + 1
            if steps > cap:
                raise RuntimeLimit(f"excursion exceeded {cap} steps")
            return steps
        steps += block
        if steps > cap:
            raise RuntimeLimit(f"excursion exceeded {cap} steps")
        pos = int(path[-1])
        block = min(block * 2, 1 << 16)


def sample_excursion_shortcut(params: ModelParams, rng: np.random.Generator,
                              cap: int = STEP_CAP) -> ExcursionRecord:
    """Draw one excursion from the walk + max-of-uniforms decomposition.

    The walk is simulated step by step (not drawn from the pmf); the
    strongest fitness is the maximum of (k+m)/2 fresh uniforms.
    """
    m = params.m
    k = _first_passage(params.p, m, rng, cap)
    deaths = (k + m) // 2
    births = (k - m) // 2 + m
    strongest = float(rng.random(deaths).max())
    return ExcursionRecord(k + 1, births, deaths, strongest)


def _shortcut_chunk(args) -> list[ExcursionRecord]:
    params, seed, chunk, count, cap = args
    rng = chunk_rng(seed, SHORTCUT_STREAM, chunk)
    return [sample_excursion_shortcut(params, rng, cap) for _ in range(count)]


def sample_shortcut(params: ModelParams, n: int, seed: int, workers: int = 1,
                    cap: int = STEP_CAP) -> list[ExcursionRecord]:
    """n shortcut excursions. Output depends on (params, n, seed) only, not on workers."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    jobs = []
    for chunk, start in enumerate(range(0, n, CHUNK_SIZE)):
        jobs.append((params, seed, chunk, min(CHUNK_SIZE, n - start), cap))
    if workers <= 1:
        parts = map(_shortcut_chunk, jobs)
        return [r for part in parts for r in part]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return [r for part in pool.map(_shortcut_chunk, jobs) for r in part]
