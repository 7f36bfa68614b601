"""Exact and simulated fitness of the strongest individual in the subcritical GMS(m) model."""
from .errors import DomainError, NonConvergence, NumericalError, RuntimeLimit
from .fitness_law import ModelParams, cdf, cdf_closed_m1, mean, mean_half, pdf
from .hypergeom import SeriesControl, hyp2f1, hyp2f1_at_one

__version__ = "0.1.0"
