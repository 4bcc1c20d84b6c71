"""Signed joint quasi-probability tables behind the measured densities.

The pointer densities are exact mixtures of Gaussians with variance
``delta_s^2`` centered at s1 = -1, 0, +1: expanding the measurement kernel in
the s1 eigenprojectors produces Gaussians at the eigenvalues plus a cross
term centered at their midpoint, damped by exp(-1/(2 delta_s^2)). The mixture
weights form a signed joint distribution over (s1, s2) labels; the midpoint
label s1 = 0 can carry negative weight even though every observable density
stays nonnegative. In the infinite-resolution limit (``delta_s = math.inf``)
the damping disappears and the weights reach their full strength.

Two independent routes to every table are provided: the analytic projector
construction (the product) and a least-squares deconvolution of the sampled
density (the oracle).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import hermitian_eigen, require_normalized, tensor
from .measurement import (
    LIMIT,
    OutcomeDensity,
    PAIR_LABELS,
    PointerGrid,
    SINGLE_LABELS,
    validate_resolution,
)
from .polarization import chsh_combination, stokes_eigenstate, stokes_operator, two_photon_stokes

S1_CENTERS = (-1, 0, 1)
K_VALUES = (-2, -1, 0, 1, 2)

# Serialization orders for the pair table: columns are arm-a labels, rows are
# arm-b labels.
PAIR_COLUMN_LABELS = ((-1, -1), (0, -1), (1, -1), (-1, 1), (0, 1), (1, 1))
PAIR_ROW_LABELS = ((1, 1), (0, 1), (-1, 1), (1, -1), (0, -1), (-1, -1))

CONDITION_LIMIT = 1e10

# Ordered eigenvalue pairs (e, e') whose midpoint is each s1 center; the
# center 0 collects both cross terms, which doubles the real part.
_CENTER_PAIRS = {
    -1: ((-1, -1),),
    0: ((1, -1), (-1, 1)),
    1: ((1, 1),),
}


class IllConditionedDesignError(ValueError):
    """Deconvolution design matrix too close to singular to invert reliably."""

    def __init__(self, delta_s: float, condition_number: float):
        self.delta_s = delta_s
        self.condition_number = condition_number
        super().__init__(
            f"Gaussian design matrix is ill-conditioned at delta_s={delta_s!r} "
            f"(condition number {condition_number:.3e} > {CONDITION_LIMIT:.0e}); "
            "the component Gaussians are nearly collinear"
        )


@dataclass(frozen=True)
class QuasiProbTable:
    """Signed weights over joint (s1, s2) labels, one label pair per photon.

    Keys are ``(s1, s2)`` for one photon and ``((s1a, s2a), (s1b, s2b))`` for
    a pair. Finite-resolution tables keep the raw damped cross-term weights;
    ``deficit`` records how far their sum falls short of one (identically
    zero for the projector construction, where the cross terms cancel in the
    total).
    """

    entries: dict
    delta_s: float
    arms: int
    deficit: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "deficit", 1.0 - self.total)

    @property
    def total(self) -> float:
        return float(sum(self.entries.values()))

    def weight(self, label) -> float:
        return self.entries[label]


@dataclass(frozen=True)
class KDistribution:
    """Signed distribution of the CHSH combination over its five values."""

    weights: dict

    def total(self) -> float:
        return float(sum(self.weights.values()))

    def mean(self) -> float:
        return float(sum(k * w for k, w in self.weights.items()))


def _cross_damping(e: int, e_prime: int, delta_s: float) -> float:
    if e == e_prime or math.isinf(delta_s):
        return 1.0
    return math.exp(-((e - e_prime) ** 2) / (8.0 * delta_s**2))


def _projector_by_eigenvalue(operator) -> dict:
    decomposition = hermitian_eigen(operator)
    return {
        int(round(value)): projector
        for value, projector in zip(decomposition.distinct_eigenvalues, decomposition.projectors)
    }


def quasiprob_table_single(state, delta_s: float) -> QuasiProbTable:
    """Joint quasi-probability table of (s1, s2) for one photon.

    With A_e(s2) = <s2| P_e |state> over the s1 eigenprojectors, the weight
    at s1 = +-1 is |A_e(s2)|^2 and the weight at the midpoint s1 = 0 is
    2 Re[A_+ conj(A_-)] times the cross damping (1 in the limit).
    """
    psi = require_normalized(state)
    if psi.size != 2:
        raise ValueError(f"single-photon state must have dimension 2, got {psi.size}")
    delta_s = validate_resolution(delta_s, allow_limit=True)

    projectors = _projector_by_eigenvalue(stokes_operator(1))
    amplitudes = {
        (e, s2): complex(np.vdot(stokes_eigenstate(2, s2), projectors[e] @ psi))
        for e in (-1, 1)
        for s2 in SINGLE_LABELS
    }

    entries = {}
    for s2 in SINGLE_LABELS:
        for center in S1_CENTERS:
            weight = 0.0
            for e, e_prime in _CENTER_PAIRS[center]:
                product = amplitudes[(e, s2)] * amplitudes[(e_prime, s2)].conjugate()
                weight += product.real * _cross_damping(e, e_prime, delta_s)
            entries[(center, s2)] = weight
    return QuasiProbTable(entries=entries, delta_s=delta_s, arms=1)


def quasiprob_table_pair(state, delta_s: float, *, delta_s_b: float | None = None) -> QuasiProbTable:
    """Joint quasi-probability table over both photons (36 entries).

    Generalizes the single-photon construction with one projector index per
    arm: amplitudes A(ea, eb; s2a, s2b) = <s2a, s2b| P_ea P_eb |state>, and
    each arm contributes its own cross damping factor.
    """
    psi = require_normalized(state)
    if psi.size != 4:
        raise ValueError(f"pair state must have dimension 4, got {psi.size}")
    delta_s = validate_resolution(delta_s, allow_limit=True)
    delta_s_b = delta_s if delta_s_b is None else validate_resolution(delta_s_b, allow_limit=True)

    projectors_a = _projector_by_eigenvalue(two_photon_stokes(1, "a"))
    projectors_b = _projector_by_eigenvalue(two_photon_stokes(1, "b"))
    readout = {
        (s2a, s2b): tensor(stokes_eigenstate(2, s2a), stokes_eigenstate(2, s2b))
        for s2a, s2b in PAIR_LABELS
    }
    amplitudes = {
        (ea, eb, s2): complex(np.vdot(readout[s2], projectors_a[ea] @ (projectors_b[eb] @ psi)))
        for ea in (-1, 1)
        for eb in (-1, 1)
        for s2 in PAIR_LABELS
    }

    entries = {}
    for label_b in PAIR_ROW_LABELS:
        center_b, s2b = label_b
        for label_a in PAIR_COLUMN_LABELS:
            center_a, s2a = label_a
            weight = 0.0
            for ea, ea_prime in _CENTER_PAIRS[center_a]:
                for eb, eb_prime in _CENTER_PAIRS[center_b]:
                    product = (
                        amplitudes[(ea, eb, (s2a, s2b))]
                        * amplitudes[(ea_prime, eb_prime, (s2a, s2b))].conjugate()
                    )
                    weight += (
                        product.real
                        * _cross_damping(ea, ea_prime, delta_s)
                        * _cross_damping(eb, eb_prime, delta_s_b)
                    )
            entries[(label_a, label_b)] = weight
    return QuasiProbTable(entries=entries, delta_s=delta_s, arms=2)


def _gaussian_columns(points: np.ndarray, delta_s: float) -> np.ndarray:
    """Normalized Gaussians of variance delta_s^2 at the s1 centers, one column each."""
    gaps = points[:, None] - np.array(S1_CENTERS, dtype=float)[None, :]
    return np.exp(-(gaps**2) / (2.0 * delta_s**2)) / math.sqrt(2.0 * math.pi * delta_s**2)


def reconstruct_density(
    table: QuasiProbTable, grid: PointerGrid, grid_b: PointerGrid | None = None
) -> OutcomeDensity:
    """Remix the table's weights into Gaussians of variance delta_s^2.

    Inverse of the interpretation behind the tables: at finite resolution the
    result equals the directly computed outcome density at every grid point.
    """
    delta_s = validate_resolution(table.delta_s)
    columns = _gaussian_columns(grid.points(), delta_s)
    if table.arms == 1:
        values = np.zeros((grid.count, len(SINGLE_LABELS)))
        for j, s2 in enumerate(SINGLE_LABELS):
            for i, center in enumerate(S1_CENTERS):
                values[:, j] += table.entries[(center, s2)] * columns[:, i]
        return OutcomeDensity(grids=(grid,), labels=SINGLE_LABELS, values=values)

    if grid_b is None:
        raise ValueError("pair tables need both grids to reconstruct the density")
    columns_b = _gaussian_columns(grid_b.points(), delta_s)
    values = np.zeros((grid.count, grid_b.count, len(PAIR_LABELS)))
    for j, (s2a, s2b) in enumerate(PAIR_LABELS):
        for i_a, center_a in enumerate(S1_CENTERS):
            for i_b, center_b in enumerate(S1_CENTERS):
                weight = table.entries[((center_a, s2a), (center_b, s2b))]
                values[:, :, j] += weight * np.outer(columns[:, i_a], columns_b[:, i_b])
    return OutcomeDensity(grids=(grid, grid_b), labels=PAIR_LABELS, values=values)


def _check_grid_coverage(grid: PointerGrid, delta_s: float) -> None:
    lo_needed = min(S1_CENTERS) - 6.0 * delta_s
    hi_needed = max(S1_CENTERS) + 6.0 * delta_s
    if grid.lo > lo_needed or grid.hi < hi_needed:
        raise ValueError(
            f"grid [{grid.lo}, {grid.hi}] does not cover the centers +- 6 delta_s "
            f"([{lo_needed}, {hi_needed}]) needed for the fit"
        )


def deconvolve(density: OutcomeDensity, delta_s: float) -> QuasiProbTable:
    """Recover the signed mixture weights from a sampled density.

    Least-squares fit, per readout label, onto Gaussians of variance
    ``delta_s^2`` centered at the s1 labels (separable products of them in
    the pair case), solved through the normal equations of the sampled
    design matrix. Acts as the independent oracle for the analytic tables.
    """
    delta_s = validate_resolution(delta_s)
    for grid in density.grids:
        _check_grid_coverage(grid, delta_s)

    if len(density.grids) == 1:
        design = _gaussian_columns(density.grids[0].points(), delta_s)
        centers: list = list(S1_CENTERS)
    else:
        columns_a = _gaussian_columns(density.grids[0].points(), delta_s)
        columns_b = _gaussian_columns(density.grids[1].points(), delta_s)
        design = np.einsum("pc,qd->pqcd", columns_a, columns_b).reshape(
            columns_a.shape[0] * columns_b.shape[0], len(S1_CENTERS) ** 2
        )
        centers = [(ca, cb) for ca in S1_CENTERS for cb in S1_CENTERS]

    condition_number = float(np.linalg.cond(design))
    if condition_number > CONDITION_LIMIT:
        raise IllConditionedDesignError(delta_s, condition_number)

    gram = design.T @ design
    entries = {}
    for j, label in enumerate(density.labels):
        samples = density.values[..., j].reshape(-1)
        weights = np.linalg.solve(gram, design.T @ samples)
        if len(density.grids) == 1:
            for center, weight in zip(centers, weights):
                entries[(center, label)] = float(weight)
        else:
            s2a, s2b = label
            for (center_a, center_b), weight in zip(centers, weights):
                entries[((center_a, s2a), (center_b, s2b))] = float(weight)

    if len(density.grids) == 1:
        ordered = {(c, s2): entries[(c, s2)] for s2 in SINGLE_LABELS for c in S1_CENTERS}
        return QuasiProbTable(entries=ordered, delta_s=delta_s, arms=1)
    ordered = {
        (label_a, label_b): entries[(label_a, label_b)]
        for label_b in PAIR_ROW_LABELS
        for label_a in PAIR_COLUMN_LABELS
    }
    return QuasiProbTable(entries=ordered, delta_s=delta_s, arms=2)


def _check_joint_label(label) -> tuple[int, int]:
    s1, s2 = label
    if s1 not in S1_CENTERS or s2 not in (-1, 1):
        raise ValueError(f"invalid joint label {label!r}: s1 in {{-1,0,1}}, s2 in {{-1,1}}")
    return int(s1), int(s2)


def k_value(label_a, label_b) -> float:
    """CHSH combination evaluated on discrete (s1, s2) labels for both arms."""
    s1a, s2a = _check_joint_label(label_a)
    s1b, s2b = _check_joint_label(label_b)
    return chsh_combination(s1a, s2a, s1b, s2b)


def k_distribution(table: QuasiProbTable) -> KDistribution:
    """Aggregate a pair table's weights by their CHSH combination value."""
    if table.arms != 2:
        raise ValueError("the CHSH distribution is defined for pair tables only")
    weights = {k: 0.0 for k in K_VALUES}
    for (label_a, label_b), weight in table.entries.items():
        weights[int(round(k_value(label_a, label_b)))] += weight
    return KDistribution(weights=weights)
