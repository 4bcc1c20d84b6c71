import math

import numpy as np
import pytest

from weakpol.measurement import (
    LIMIT,
    PAIR_LABELS,
    PointerGrid,
    coincidence_density,
    completeness_defect,
    eigenstate_density_closed_form,
    measurement_kernel,
    single_outcome_density,
)
from weakpol.polarization import bell_state, stokes_eigenstate, stokes_operator

from conftest import random_pure_state


class TestPointerGrid:
    def test_count_and_points(self):
        grid = PointerGrid(-6.0, 6.0, 0.01)
        points = grid.points()
        assert grid.count == 1201
        assert points[0] == -6.0
        assert points[-1] == pytest.approx(6.0, abs=1e-12)

    def test_rejects_bad_bounds(self):
        with pytest.raises(ValueError):
            PointerGrid(1.0, -1.0, 0.1)
        with pytest.raises(ValueError):
            PointerGrid(-1.0, 1.0, 0.0)


class TestMeasurementKernel:
    def test_centered_kernel_on_sigma_x(self):
        kernel = measurement_kernel(stokes_operator(1), 1.0, 0.0)
        expected = math.exp(-0.25) * (2.0 * math.pi) ** -0.25 * np.eye(2)
        assert np.allclose(kernel, expected, atol=1e-15)

    @pytest.mark.parametrize("m", [-2.0, -0.3, 0.0, 1.7])
    def test_commutes_with_target(self, m):
        s1 = stokes_operator(1)
        kernel = measurement_kernel(s1, 0.6, m)
        assert np.max(np.abs(kernel @ s1 - s1 @ kernel)) < 1e-15

    def test_positive_semidefinite(self):
        kernel = measurement_kernel(stokes_operator(1), 0.5, 1.3)
        assert np.linalg.eigvalsh(kernel).min() > -1e-15

    def test_limit_resolution_rejected(self):
        with pytest.raises(ValueError):
            measurement_kernel(stokes_operator(1), LIMIT, 0.0)


class TestCompleteness:
    def test_defect_small_on_adequate_grids(self):
        s1 = stokes_operator(1)
        assert completeness_defect(s1, 0.6, PointerGrid(-8, 8, 1e-3)) < 1e-6
        assert completeness_defect(s1, 2.0, PointerGrid(-14, 14, 1e-3)) < 1e-6

    def test_truncated_grid_is_detected(self):
        defect = completeness_defect(stokes_operator(1), 2.0, PointerGrid(-2, 2, 1e-3))
        assert defect > 0.1


class TestSingleOutcomeDensity:
    def test_peak_value_for_s2_plus_eigenstate(self):
        # Oracle: the closed form at m=0 is exp(-1/(2 ds^2)) / sqrt(2 pi ds^2),
        # which evaluates to 0.16579523132124782 at ds=0.6; the s2=-1 sheet
        # carries a sinh(0)^2 = 0 factor there.
        density = single_outcome_density(stokes_eigenstate(2, +1), 0.6, PointerGrid(-6, 6, 0.01))
        center = 600
        expected = math.exp(-1.0 / 0.72) / math.sqrt(2.0 * math.pi * 0.36)
        assert density.sheet(1)[center] == pytest.approx(expected, abs=1e-12)
        assert abs(expected - 0.16580) < 5e-6
        assert density.sheet(-1)[center] == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("delta_s", [0.3, 0.6, 1.0, 2.0])
    def test_matches_closed_form_oracle(self, delta_s):
        grid = PointerGrid(-4, 4, 0.01)
        density = single_outcome_density(stokes_eigenstate(2, +1), delta_s, grid)
        p_plus, p_minus = eigenstate_density_closed_form(delta_s, grid.points())
        assert np.max(np.abs(density.sheet(1) - p_plus)) < 1e-12
        assert np.max(np.abs(density.sheet(-1) - p_minus)) < 1e-12

    def test_matches_literal_kernel_application(self):
        state = stokes_eigenstate(2, +1)
        grid = PointerGrid(-3, 3, 0.5)
        density = single_outcome_density(state, 0.6, grid)
        for i, m in enumerate(grid.points()):
            kernel = measurement_kernel(stokes_operator(1), 0.6, float(m))
            for s2 in (1, -1):
                literal = abs(np.vdot(stokes_eigenstate(2, s2), kernel @ state)) ** 2
                assert density.sheet(s2)[i] == pytest.approx(literal, abs=1e-14)

    def test_parity_symmetry_of_eigenstate_density(self):
        density = single_outcome_density(stokes_eigenstate(2, +1), 0.6, PointerGrid(-4, 4, 0.01))
        assert np.allclose(density.values, density.values[::-1], atol=1e-15)

    def test_normalization(self):
        density = single_outcome_density(stokes_eigenstate(2, +1), 0.6, PointerGrid(-6, 6, 0.01))
        assert density.integrate() == pytest.approx(1.0, abs=1e-6)

    def test_back_action_populates_other_outcome(self):
        density = single_outcome_density(stokes_eigenstate(2, +1), 0.6, PointerGrid(-6, 6, 0.01))
        at_two = int(round((2.0 - (-6.0)) / 0.01))
        assert density.sheet(-1)[at_two] > 0.0

    def test_wrong_dimension_rejected(self):
        with pytest.raises(ValueError, match="dimension 2"):
            single_outcome_density(bell_state(), 0.6, PointerGrid(-6, 6, 0.1))

    def test_limit_resolution_rejected(self):
        with pytest.raises(ValueError):
            single_outcome_density(stokes_eigenstate(2, +1), LIMIT, PointerGrid(-6, 6, 0.1))


class TestClosedForm:
    def test_against_inline_formula(self):
        delta_s, m = 0.6, 1.0
        variance = delta_s**2
        envelope = math.exp(-(m**2 + 1) / (2 * variance)) / math.sqrt(2 * math.pi * variance)
        p_plus, p_minus = eigenstate_density_closed_form(delta_s, m)
        assert p_plus == pytest.approx(envelope * math.cosh(m / (2 * variance)) ** 2, abs=1e-15)
        assert p_minus == pytest.approx(envelope * math.sinh(m / (2 * variance)) ** 2, abs=1e-15)

    @pytest.mark.parametrize("delta_s", [0.4, 0.6, 1.5])
    def test_sum_identity(self, delta_s):
        # cosh^2 + sinh^2 = cosh(2x)
        m = np.linspace(-3, 3, 61)
        p_plus, p_minus = eigenstate_density_closed_form(delta_s, m)
        variance = delta_s**2
        expected = (
            np.exp(-(m**2 + 1) / (2 * variance))
            / math.sqrt(2 * math.pi * variance)
            * np.cosh(m / variance)
        )
        assert np.max(np.abs(p_plus + p_minus - expected)) < 1e-14


@pytest.fixture(scope="module")
def bell_density():
    grid = PointerGrid(-14, 14, 0.05)
    return coincidence_density(bell_state(), 2.0, grid, grid)


class TestCoincidenceDensity:

    def test_anticorrelated_sheet_peaks_beyond_eigenvalues(self, bell_density):
        root_two = math.sqrt(2.0)
        ma, mb = bell_density.peak_location((1, -1))
        assert abs(ma - root_two) <= 0.05 and abs(mb - root_two) <= 0.05
        ma, mb = bell_density.peak_location((-1, 1))
        assert abs(ma + root_two) <= 0.05 and abs(mb + root_two) <= 0.05

    def test_total_normalization(self, bell_density):
        assert bell_density.integrate() == pytest.approx(1.0, abs=1e-4)

    def test_point_reflection_symmetry_between_correlated_sheets(self, bell_density):
        sheet_pp = bell_density.sheet((1, 1))
        sheet_mm = bell_density.sheet((-1, -1))
        assert np.max(np.abs(sheet_pp - sheet_mm[::-1, ::-1])) < 1e-15

    def test_per_arm_resolutions_default_equal(self):
        grid = PointerGrid(-8, 8, 0.2)
        same = coincidence_density(bell_state(), 1.0, grid, grid, delta_s_b=1.0)
        default = coincidence_density(bell_state(), 1.0, grid, grid)
        assert np.array_equal(same.values, default.values)

    def test_wrong_dimension_rejected(self):
        grid = PointerGrid(-8, 8, 0.5)
        with pytest.raises(ValueError, match="dimension 4"):
            coincidence_density(stokes_eigenstate(2, +1), 1.0, grid, grid)


class TestNonnegativity:
    def test_densities_of_random_states_are_nonnegative(self, rng):
        grid_1d = PointerGrid(-6, 6, 0.02)
        for _ in range(25):
            density = single_outcome_density(random_pure_state(rng, 2), 0.6, grid_1d)
            assert density.values.min() >= -1e-12
        grid_2d = PointerGrid(-6, 6, 0.1)
        for _ in range(25):
            density = coincidence_density(random_pure_state(rng, 4), 0.6, grid_2d, grid_2d)
            assert density.values.min() >= -1e-12

    def test_pair_labels_cover_all_four_sheets(self):
        assert set(PAIR_LABELS) == {(1, 1), (1, -1), (-1, 1), (-1, -1)}
