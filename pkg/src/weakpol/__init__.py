"""Finite-resolution polarization measurement statistics.

Simulates Gaussian pointer measurements of the s1 Stokes component on single
photons and entangled pairs, the resulting outcome densities, the signed
joint quasi-probability tables hiding behind them, and the distribution of
the CHSH correlation that explains the Bell violation.
"""

from .linalg import (
    SpectralDecomposition,
    expectation,
    hermitian_eigen,
    operator_function,
    tensor,
)
from .measurement import (
    LIMIT,
    OutcomeDensity,
    PAIR_LABELS,
    PointerGrid,
    SINGLE_LABELS,
    coincidence_density,
    completeness_defect,
    eigenstate_density_closed_form,
    measurement_kernel,
    single_outcome_density,
)
from .polarization import (
    bell_expectation,
    bell_operator,
    bell_state,
    chsh_combination,
    classical_chsh_bound,
    stokes_eigenstate,
    stokes_operator,
    two_photon_stokes,
)
from .quasiprob import (
    IllConditionedDesignError,
    KDistribution,
    PAIR_COLUMN_LABELS,
    PAIR_ROW_LABELS,
    QuasiProbTable,
    deconvolve,
    k_distribution,
    k_value,
    quasiprob_table_pair,
    quasiprob_table_single,
    reconstruct_density,
)

__all__ = [
    "LIMIT",
    "IllConditionedDesignError",
    "KDistribution",
    "OutcomeDensity",
    "PAIR_COLUMN_LABELS",
    "PAIR_LABELS",
    "PAIR_ROW_LABELS",
    "PointerGrid",
    "QuasiProbTable",
    "SINGLE_LABELS",
    "SpectralDecomposition",
    "bell_expectation",
    "bell_operator",
    "bell_state",
    "chsh_combination",
    "classical_chsh_bound",
    "coincidence_density",
    "completeness_defect",
    "deconvolve",
    "eigenstate_density_closed_form",
    "expectation",
    "hermitian_eigen",
    "k_distribution",
    "k_value",
    "measurement_kernel",
    "operator_function",
    "quasiprob_table_pair",
    "quasiprob_table_single",
    "reconstruct_density",
    "single_outcome_density",
    "stokes_eigenstate",
    "stokes_operator",
    "tensor",
    "two_photon_stokes",
]

__version__ = "0.1.0"
