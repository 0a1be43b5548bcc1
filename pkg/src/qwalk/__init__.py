"""Two-state quantum walks on the integer line with an absorbing origin."""

from .asymptotics import DensityModel, UnitaryDensityModel, normalization_N, polya_closed_form, polya_symmetric
from .convergence import ConvergenceReport, EmpiricalCDF, convergence_ladder, kolmogorov_distance
from .core import CoinMatrix, CoinSet, CoinState, WalkerState, evolve, hadamard, initial_state, rotation
from .errors import (
    DegenerateSurvivalError,
    EnumerationCapError,
    NonMixingCoinError,
    NonUnitaryCoinError,
    NormalizationError,
    ParityError,
    QWalkError,
)
from .observables import Distribution, SurvivalRecord, conditional_distribution, polya_series, survival_series

__all__ = [
    "CoinMatrix",
    "CoinSet",
    "CoinState",
    "WalkerState",
    "hadamard",
    "rotation",
    "initial_state",
    "evolve",
    "Distribution",
    "SurvivalRecord",
    "conditional_distribution",
    "survival_series",
    "polya_series",
    "DensityModel",
    "UnitaryDensityModel",
    "normalization_N",
    "polya_closed_form",
    "polya_symmetric",
    "EmpiricalCDF",
    "ConvergenceReport",
    "kolmogorov_distance",
    "convergence_ladder",
    "QWalkError",
    "NonUnitaryCoinError",
    "NormalizationError",
    "NonMixingCoinError",
    "DegenerateSurvivalError",
    "ParityError",
    "EnumerationCapError",
]
