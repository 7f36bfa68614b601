"""
Event-by-event simulation of the GMS(m) model.

Each step is a birth with probability p or a death with probability q. A
birth draws a Uniform(0, 1) fitness; a death removes the living individual
with the lowest fitness. When the system is empty a birth step places m
individuals at once and a death step is an idle no-op. The population is a
binary heap keyed by (fitness, insertion ordinal), so equal fitnesses leave
in insertion order.

Excursions are independent given the revival rule, so they are simulated
in fixed-size chunks, each with its own RNG stream derived from the seed
and the chunk index. Output therefore does not depend on the worker count.
"""
from __future__ import annotations

import heapq
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, RuntimeLimit
from .excursion import CHUNK_SIZE, STEP_CAP, ExcursionRecord, chunk_rng
from .fitness_law import ModelParams
from .stats import EmpiricalDistribution, Histogram, histogram

__all__ = [
    "ExcursionRecord",
    "PopulationState",
    "SimConfig",
    "simulate_excursion",
    "run_full_simulation",
    "reproduce_figure1",
    "FigureSeries",
]

FULL_STREAM = 0
_BUFFER = 256


class PopulationState:
    """Ordered multiset of living fitnesses with O(log n) insert and delete-min."""

    __slots__ = ("_heap", "_ordinal")

    def __init__(self):
        self._heap: list[tuple[float, int]] = []
        self._ordinal = 0

    def __len__(self) -> int:
        return len(self._heap)

    @property
    def size(self) -> int:
        return len(self._heap)

    def add(self, fitness: float) -> None:
        heapq.heappush(self._heap, (fitness, self._ordinal))
        self._ordinal += 1

    def remove_min(self) -> float:
        return heapq.heappop(self._heap)[0]

    def peek_min(self) -> float:
        return self._heap[0][0]

    def fitnesses(self) -> list[float]:
        return sorted(f for f, _ in self._heap)


@dataclass(frozen=True)
class SimConfig:
    params: ModelParams
    seed: int
    n_excursions: Optional[int] = None
    n_steps: Optional[int] = None
    workers: int = 1
    # Optional budget on the summed excursion lengths, on top of the
    # per-excursion STEP_CAP.
    max_events: Optional[int] = None

    def __post_init__(self):
        if (self.n_excursions is None) == (self.n_steps is None):
            raise DomainError("set exactly one of n_excursions / n_steps")
        if self.n_excursions is not None and self.n_excursions < 1:
            raise DomainError(f"n_excursions must be >= 1, got {self.n_excursions}")
        if self.n_steps is not None and self.n_steps < 1:
            raise DomainError(f"n_steps must be >= 1, got {self.n_steps}")
        if self.workers < 1:
            raise DomainError(f"workers must be >= 1, got {self.workers}")
        if self.max_events is not None and self.max_events < 1:
            raise DomainError(f"max_events must be >= 1, got {self.max_events}")


def simulate_excursion(params: ModelParams, rng: np.random.Generator,
                       cap: int = STEP_CAP) -> tuple[ExcursionRecord, float]:
    """Run one excursion from the revival step until the system is empty.

    Returns the record and the largest fitness born during the excursion,
    tracked independently of the population structure. Raises RuntimeLimit
    once the excursion takes more than ``cap`` steps.
    """
    p, m = params.p, params.m
    pop = PopulationState()
    add, remove_min = pop.add, pop.remove_min
    buf = rng.random(max(_BUFFER, m)).tolist()
    i = 0
    max_born = 0.0
    for _ in range(m):
        u = buf[i]
        i += 1
        add(u)
        if u > max_born:
            max_born = u
    births, deaths, steps = m, 0, 1
    last = 0.0
    n_buf = len(buf)
    while pop._heap:
        if steps >= cap:
            raise RuntimeLimit(f"excursion exceeded {cap} steps")
        if i >= n_buf - 1:
            buf = rng.random(_BUFFER).tolist()
            n_buf = _BUFFER
            i = 0
        steps += 1
        if buf[i] < p:
            u = buf[i + 1]
            i += 2
            add(u)
            births += 1
            if u > max_born:
                max_born = u
        else:
            i += 1
            last = remove_min()
            deaths += 1
    return ExcursionRecord(steps, births, deaths, last), max_born


def _full_chunk(args) -> tuple[list[ExcursionRecord], bool]:
    """Simulate one chunk. The flag is True if an excursion hit ``cap``."""
    params, seed, chunk, count, cap, strict = args
    rng = chunk_rng(seed, FULL_STREAM, chunk)
    out = []
    for _ in range(count):
        try:
            record, max_born = simulate_excursion(params, rng, cap)
        except RuntimeLimit:
            if strict:
                raise
            return out, True
        if record.strongest_fitness != max_born or record.births != record.deaths:
            raise AssertionError(f"excursion bookkeeping violated: {record}, max born {max_born}")
        out.append(record)
    return out, False


def _run_chunks(jobs, workers):
    if workers <= 1:
        yield from map(_full_chunk, jobs)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(_full_chunk, jobs)


def run_full_simulation(config: SimConfig) -> list[ExcursionRecord]:
    """Simulate until n_excursions complete, or until n_steps events are used.

    In n_steps mode an event is one non-idle step (the batch revival counts
    as one step), and the trailing incomplete excursion is discarded.
    """
    params, seed = config.params, config.seed
    budget = config.max_events
    if config.n_excursions is not None:
        n = config.n_excursions
        records: list[ExcursionRecord] = []
        used = 0

        def jobs():
            # Serial runs read `used` lazily, so the cap tracks the remaining
            # budget; a pool consumes the jobs up front and sees the full budget.
            for c, s in enumerate(range(0, n, CHUNK_SIZE)):
                cap = STEP_CAP if budget is None else min(STEP_CAP, budget - used + 1)
                yield params, seed, c, min(CHUNK_SIZE, n - s), cap, True

        try:
            for part, _ in _run_chunks(jobs(), config.workers):
                records.extend(part)
                used += sum(r.length for r in part)
                if budget is not None and used > budget:
                    raise RuntimeLimit(f"simulation exceeded the {budget}-event budget")
        except RuntimeLimit:
            if budget is None:
                raise
            raise RuntimeLimit(f"simulation exceeded the {budget}-event budget") from None
        return records

    n_steps = config.n_steps
    if budget is not None and budget < n_steps:
        raise DomainError("max_events is smaller than n_steps")
    records = []
    used = 0
    chunk = 0
    wave = max(1, config.workers)
    while True:
        jobs = [(params, seed, chunk + j, CHUNK_SIZE, n_steps, False) for j in range(wave)]
        chunk += wave
        for part, truncated in _run_chunks(jobs, config.workers):
            for r in part:
                if used + r.length > n_steps:
                    return records
                used += r.length
                records.append(r)
            if truncated:
                return records


@dataclass(frozen=True)
class FigureSeries:
    m: int
    histogram: Histogram
    sample: EmpiricalDistribution
    steps_used: int

    @property
    def sample_mean(self) -> float:
        return float(self.sample.sorted_samples.mean())

    @property
    def standard_error(self) -> float:
        x = self.sample.sorted_samples
        return float(x.std(ddof=1) / np.sqrt(x.size))


def reproduce_figure1(p: float, m_values: list[int], n_steps: int = 200_000,
                      bins: int = 50, seed: int = 0, workers: int = 1) -> dict[int, FigureSeries]:
    """Histogram strongest fitnesses of GMS(m) runs of n_steps births and deaths each."""
    if n_steps < 10_000:
        raise DomainError(f"n_steps must be >= 10000, got {n_steps}")
    out = {}
    for m in m_values:
        config = SimConfig(ModelParams(p, m), seed=seed, n_steps=n_steps, workers=workers)
        records = run_full_simulation(config)
        if not records:
            raise RuntimeLimit(f"no excursion completed within {n_steps} steps for m={m}")
        sample = EmpiricalDistribution.from_samples([r.strongest_fitness for r in records])
        out[m] = FigureSeries(m, histogram(sample, bins, 0.0, 1.0), sample,
                              sum(r.length for r in records))
    return out
