import numpy as np
import pytest

from gmsfit.errors import DomainError, RuntimeLimit
from gmsfit.excursion import CHUNK_SIZE, chunk_rng, sample_shortcut
from gmsfit.fitness_law import ModelParams, cdf, mean
from gmsfit.gms_sim import (
    PopulationState,
    SimConfig,
    reproduce_figure1,
    run_full_simulation,
    simulate_excursion,
)
from gmsfit.stats import EmpiricalDistribution, ks_one_sample, ks_two_sample
from gmsfit.validation import length_chi_square_two_sample, strongest_sample


def test_population_state_min_extraction():
    pop = PopulationState()
    for f in [0.2, 0.9, 0.4]:
        pop.add(f)
    assert pop.size == 3
    assert pop.peek_min() == 0.2
    assert pop.remove_min() == 0.2
    assert pop.fitnesses() == [0.4, 0.9]
    assert pop.remove_min() == 0.4
    assert len(pop) == 1


def test_population_state_ties_keep_insertion_order():
    pop = PopulationState()
    pop.add(0.5)
    pop.add(0.5)
    pop.add(0.1)
    assert [pop.remove_min() for _ in range(3)] == [0.1, 0.5, 0.5]


@pytest.mark.parametrize("p,m", [(0.3, 1), (0.45, 2), (0.5, 4), (0.2, 9)])
def test_excursion_invariants(p, m):
    params = ModelParams(p, m)
    rng = chunk_rng(17, 0, 0)
    for _ in range(300):
        try:
            record, max_born = simulate_excursion(params, rng, cap=100_000)
        except RuntimeLimit:
            continue
        assert record.births == record.deaths
        assert record.length == record.births + record.deaths - m + 1
        assert record.strongest_fitness == max_born
        assert record.k >= m and (record.k - m) % 2 == 0


def test_short_excursion_fraction():
    # m = 1: a death right after the revival empties the system, probability q
    records = run_full_simulation(SimConfig(ModelParams(0.3, 1), seed=4, n_excursions=20_000))
    frac = np.mean([r.length == 2 for r in records])
    assert abs(frac - 0.7) < 4 * np.sqrt(0.21 / 20_000)


def test_determinism_and_worker_invariance():
    params = ModelParams(0.4, 3)
    n = 2 * CHUNK_SIZE + 37
    a = run_full_simulation(SimConfig(params, seed=3, n_excursions=n))
    b = run_full_simulation(SimConfig(params, seed=3, n_excursions=n, workers=2))
    c = run_full_simulation(SimConfig(params, seed=4, n_excursions=n))
    assert len(a) == n
    assert a == b
    assert a != c


def test_step_mode_deterministic_and_bounded():
    params = ModelParams(0.45, 2)
    a = run_full_simulation(SimConfig(params, seed=8, n_steps=50_000))
    b = run_full_simulation(SimConfig(params, seed=8, n_steps=50_000, workers=2))
    assert a == b
    assert sum(r.length for r in a) <= 50_000
    assert len(a) > 0


def test_step_mode_is_prefix_of_excursion_mode():
    params = ModelParams(0.3, 1)
    by_steps = run_full_simulation(SimConfig(params, seed=2, n_steps=20_000))
    by_count = run_full_simulation(SimConfig(params, seed=2, n_excursions=len(by_steps) + 5))
    assert by_count[:len(by_steps)] == by_steps


@pytest.mark.parametrize("kwargs", [
    {},
    {"n_excursions": 10, "n_steps": 10},
    {"n_excursions": 0},
    {"n_steps": -1},
    {"n_excursions": 5, "workers": 0},
    {"n_excursions": 5, "max_events": 0},
])
def test_sim_config_validation(kwargs):
    with pytest.raises(DomainError):
        SimConfig(ModelParams(0.3, 1), seed=0, **kwargs)


def test_event_budget_raises():
    config = SimConfig(ModelParams(0.5, 5), seed=1, n_excursions=2000, max_events=1000)
    with pytest.raises(RuntimeLimit):
        run_full_simulation(config)


def test_excursion_cap_raises():
    with pytest.raises(RuntimeLimit):
        simulate_excursion(ModelParams(0.5, 40), chunk_rng(0, 0, 0), cap=50)


@pytest.mark.parametrize("p,m", [(0.25, 1), (0.4, 3)])
def test_strongest_fitness_matches_exact_law(p, m):
    params = ModelParams(p, m)
    records = run_full_simulation(SimConfig(params, seed=12, n_excursions=20_000))
    report = ks_one_sample(strongest_sample(records), lambda t: cdf(params, t))
    assert report.passed, report
    x = strongest_sample(records).sorted_samples
    assert abs(x.mean() - mean(params)) < 4 * x.std(ddof=1) / np.sqrt(x.size)


def test_full_and_shortcut_agree():
    params = ModelParams(0.35, 2)
    full = run_full_simulation(SimConfig(params, seed=6, n_excursions=20_000))
    short = sample_shortcut(params, 20_000, seed=6)
    assert ks_two_sample(strongest_sample(full), strongest_sample(short)).passed
    assert length_chi_square_two_sample(full, short).passed


def test_reproduce_figure_single_bin():
    series = reproduce_figure1(0.25, [1, 2], n_steps=20_000, bins=1, seed=3)
    for m, s in series.items():
        assert s.histogram.counts.tolist() == [s.sample.n]
        assert s.steps_used <= 20_000
        assert s.standard_error > 0


def test_reproduce_figure_rejects_short_runs():
    with pytest.raises(DomainError):
        reproduce_figure1(0.25, [1], n_steps=9_999)


def test_reproduce_figure_matches_exact_law():
    params = ModelParams(0.25, 1)
    series = reproduce_figure1(0.25, [1], n_steps=200_000, seed=5)[1]
    report = ks_one_sample(series.sample, lambda t: cdf(params, t))
    assert report.statistic < 0.01
    assert series.histogram.counts.sum() == series.sample.n
