"""Gaussian combs: analytic operations against grid quadrature, conditional and target states."""
import logging
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

import state_model as sm
from errors import DomainError, GridTooCoarse, HalfIntegerUnsupported, QuadratureMismatch
from spin_algebra import TotalSpin, outcomes
from state_model import EncodingParams, GaussianComb, GaussianComponent, Quadrature, QuadratureGrid


def _grid_overlap(a, b, grid):
    return np.sum(np.conj(sm.evaluate(a, grid)) * sm.evaluate(b, grid)) * grid.step


@pytest.fixture
def mixed_comb():
    """Three components with different widths, phases and one momentum kick."""
    return sm.make_comb([
        GaussianComponent(-1.3, 0.4, 0.7 + 0.2j),
        GaussianComponent(0.2, 0.15, -0.4j, 1.1),
        GaussianComponent(1.8, 0.9, 0.5),
    ])


class TestCombConstruction:

    def test_components_sorted_and_merged(self):
        comb = sm.make_comb([
            GaussianComponent(1.0, 0.5, 1.0),
            GaussianComponent(-1.0, 0.5, 2.0),
            GaussianComponent(1.0, 0.5, 0.5),
        ])
        assert_allclose(comb.centers, [-1.0, 1.0])
        assert_allclose(comb.amplitudes, [2.0, 1.5])

    def test_zero_amplitudes_dropped(self):
        comb = sm.make_comb([GaussianComponent(0.0, 1.0, 1.0), GaussianComponent(0.0, 1.0, -1.0)])
        assert len(comb) == 0

    def test_unsorted_comb_rejected(self):
        with pytest.raises(DomainError):
            GaussianComb((GaussianComponent(1.0, 1.0, 1.0), GaussianComponent(0.0, 1.0, 1.0)))

    def test_component_variance_must_be_positive(self):
        with pytest.raises(DomainError):
            GaussianComponent(0.0, 0.0, 1.0)

    def test_serialization_keeps_everything(self, mixed_comb):
        restored = sm.comb_from_dict(sm.comb_to_dict(mixed_comb))
        assert restored == mixed_comb

    def test_malformed_dict(self):
        with pytest.raises(DomainError):
            sm.comb_from_dict({'quadrature': 'position', 'components': [{'center': 0.0}]})


class TestAnalyticOperations:

    def test_squeezed_state_normalized(self):
        for r in (-0.5, 0.0, 1.2):
            assert sm.norm(sm.squeezed_state(r)) == pytest.approx(1.0, abs=1e-14)

    def test_overlap_of_displaced_squeezed_states(self):
        r, d = 0.6, 1.3
        a, b = sm.squeezed_state(r), sm.squeezed_state(r, center=d)
        assert abs(sm.overlap(a, b)) ** 2 == pytest.approx(math.exp(-d * d / (2 * math.exp(-2 * r))))

    def test_overlap_matches_grid(self, mixed_comb):
        other = sm.displace(mixed_comb, dq=0.4, dp=-0.3)
        grid = sm.covering_grid(sm.make_comb(mixed_comb.components + other.components))
        assert sm.overlap(mixed_comb, other) == pytest.approx(_grid_overlap(mixed_comb, other, grid), abs=1e-10)

    def test_displace_moves_wavefunction(self, mixed_comb):
        u = np.linspace(-4, 4, 41)
        shifted = sm.displace(mixed_comb, dq=0.75)
        assert_allclose(shifted(u), mixed_comb(u - 0.75), atol=1e-14)
        kicked = sm.displace(mixed_comb, dp=0.5)
        assert_allclose(kicked(u), np.exp(0.5j * u) * mixed_comb(u), atol=1e-14)

    def test_displace_preserves_norm(self, mixed_comb):
        assert sm.norm(sm.displace(mixed_comb, 1.0, -2.0)) == pytest.approx(sm.norm(mixed_comb))

    def test_fourier_of_squeezed_state(self):
        state = sm.fourier(sm.squeezed_state(0.8))
        assert state.quadrature is Quadrature.MOMENTUM
        assert_allclose(state.variances, [math.exp(1.6)])
        assert sm.norm(state) == pytest.approx(1.0)

    def test_fourier_inverse(self, mixed_comb):
        back = sm.fourier(sm.fourier(mixed_comb))
        u = np.linspace(-3, 3, 31)
        assert back.quadrature is Quadrature.POSITION
        assert_allclose(back(u), mixed_comb(u), atol=1e-13)

    def test_fourier_matches_fft(self, mixed_comb):
        grid = sm.covering_grid(mixed_comb)
        p, values = sm.fourier_numeric(sm.evaluate(mixed_comb, grid), grid)
        analytic = sm.fourier(mixed_comb)(p)
        assert sm.l2_distance(values, analytic, p[1] - p[0]) < 1e-6

    def test_fidelity_ignores_phase_and_scale(self, mixed_comb):
        assert sm.fidelity(mixed_comb, mixed_comb.scaled(2j)) == pytest.approx(1.0)

    def test_quadrature_mismatch(self, mixed_comb):
        with pytest.raises(QuadratureMismatch):
            sm.overlap(mixed_comb, sm.fourier(mixed_comb))


class TestGrids:

    def test_grid_points(self):
        grid = QuadratureGrid(-1.0, 1.0, 0.25)
        assert grid.size == 9
        assert_allclose(grid.points, np.linspace(-1, 1, 9))

    def test_invalid_grid(self):
        with pytest.raises(DomainError):
            QuadratureGrid(1.0, -1.0, 0.1)
        with pytest.raises(DomainError):
            QuadratureGrid(-1.0, 1.0, 0.0)

    def test_coarse_grid_rejected(self):
        with pytest.raises(GridTooCoarse):
            sm.evaluate(sm.squeezed_state(1.0), QuadratureGrid(-5.0, 5.0, 1.0))

    def test_truncated_samples_rejected(self):
        grid = QuadratureGrid(-1.0, 1.0, 0.01)
        with pytest.raises(GridTooCoarse):
            sm.fourier_numeric(sm.evaluate(sm.squeezed_state(0.0), grid), grid)

    def test_partial_coverage(self, caplog):
        grid = QuadratureGrid(-1.0, 1.0, 0.01)
        state = sm.squeezed_state(0.0)
        with caplog.at_level(logging.WARNING):
            assert len(sm.evaluate(state, grid)) == grid.size
        assert 'does not cover' in caplog.text
        with pytest.raises(GridTooCoarse):
            sm.evaluate(state, grid, strict=True)
        sm.evaluate(state, QuadratureGrid(-5.0, 5.0, 0.01), strict=True)

    def test_covers(self):
        grid = QuadratureGrid(-2.0, 2.0, 0.1)
        assert grid.covers(-2.0, 1.5)
        assert not grid.covers(-2.5, 1.0)

    def test_grid_norm(self):
        state = sm.squeezed_state(0.3, center=0.5)
        grid = sm.covering_grid(state)
        assert sm.grid_norm(sm.evaluate(state, grid), grid.step) == pytest.approx(1.0, abs=1e-8)

    def test_conjugate_grid_spacing(self):
        grid = QuadratureGrid(-4.0, 4.0, 0.05)
        conjugate = sm.conjugate_grid(grid)
        assert conjugate.step == pytest.approx(2 * math.pi / (grid.size * grid.step))

    def test_default_grid_resolves_conditional_states(self):
        params = EncodingParams.symmetric_for('9/2')
        grid = sm.default_grid(params)
        grid.check_resolves(sm.resource_state(params, '9/2'))
        assert grid.min < -params.g * 4.5


class TestConditionalStates:

    @pytest.mark.parametrize("j", ['3', '7/2'])
    def test_probabilities_sum_to_one(self, j):
        params = EncodingParams.symmetric_for(j)
        total = sum(sm.conditional_probability(params, x) for x in outcomes(params.j))
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_position_state(self):
        params = EncodingParams.symmetric_for(4)
        state = sm.conditional_position_state(params, 4)
        assert state.normalized
        assert sm.norm(state) == pytest.approx(1.0)
        assert len(state) == 9
        assert_allclose(state.centers, params.g * np.arange(-4, 5))
        assert np.all(state.amplitudes.real > 0)

    def test_minus_state_alternates(self):
        params = EncodingParams.symmetric_for(4)
        signs = np.sign(sm.conditional_position_state(params, -4).amplitudes.real)
        assert np.all(signs[1:] == -signs[:-1])

    @pytest.mark.parametrize("j, x", [('4', '4'), ('4', '-4'), ('4', '0'), ('9/2', '9/2'), ('9/2', '-9/2'),
                                      ('1/2', '1/2'), ('6', '0')])
    def test_closed_form_matches_sum(self, j, x):
        params = EncodingParams.symmetric_for(j)
        p = np.linspace(-6, 6, 121)
        assert_allclose(sm.conditional_momentum_closed_form(params, x, p),
                        sm.conditional_momentum_sum(params, x, p), atol=1e-12)

    @pytest.mark.parametrize("j, x", [('4', '4'), ('4', '0'), ('9/2', '-9/2')])
    def test_closed_form_matches_analytic_transform(self, j, x):
        params = EncodingParams.symmetric_for(j)
        p = np.linspace(-5, 5, 101)
        momentum = sm.fourier(sm.conditional_position_state(params, x))
        assert_allclose(momentum(p), sm.conditional_momentum_closed_form(params, x, p), atol=1e-12)

    @pytest.mark.parametrize("j, x", [('2', '2'), ('2', '0'), ('9/2', '-9/2')])
    def test_closed_form_matches_fft(self, j, x):
        params = EncodingParams.symmetric_for(j)
        grid = sm.default_grid(params)
        p, values = sm.fourier_numeric(sm.evaluate(sm.conditional_position_state(params, x), grid), grid)
        closed = sm.conditional_momentum_closed_form(params, x, p)
        assert sm.l2_distance(values, closed, p[1] - p[0]) < 1e-6

    def test_general_outcome_uses_sum(self):
        params = EncodingParams.symmetric_for(3)
        p = np.linspace(-2, 2, 5)
        assert_allclose(sm.conditional_momentum_amplitude(params, 1, p), sm.conditional_momentum_sum(params, 1, p))
        with pytest.raises(DomainError):
            sm.conditional_momentum_closed_form(params, 1, p)

    def test_x0_skips_odd_components(self):
        params = EncodingParams(TotalSpin(2), 0.0, sm.SQRT_PI)
        assert sm.outcome_amplitudes(params, 0)[1] == pytest.approx(0.0, abs=1e-15)
        assert len(sm.conditional_position_state(params, 0)) == 2


class TestResourceAndTargets:

    def test_integer_resource_is_conditional_state(self):
        params = EncodingParams.symmetric_for(4)
        assert sm.resource_state(params, 4) == sm.conditional_position_state(params, 4)

    def test_half_integer_resource_has_central_spike(self):
        params = EncodingParams.symmetric_for('9/2')
        state = sm.resource_state(params, '-9/2')
        assert np.abs(state.centers).min() == 0.0
        assert len(state) == 10

    def test_resource_needs_endpoint(self):
        with pytest.raises(DomainError):
            sm.resource_state(EncodingParams.symmetric_for(4), 2)

    def test_x0_needs_integer_spin(self):
        with pytest.raises(HalfIntegerUnsupported):
            sm.x0_logical_state(EncodingParams.symmetric_for('7/2'))

    def test_x0_state_kicked(self):
        params = EncodingParams.symmetric_for(6)
        state = sm.x0_logical_state(params)
        assert_allclose(state.wavenumbers, math.pi / (2 * params.g))
        assert sm.norm(state) == pytest.approx(1.0)

    def test_target_state(self):
        plus = sm.target_state('plus', 0.2)
        minus = sm.target_state('-', 0.2)
        assert sm.norm(plus) == pytest.approx(1.0)
        signs = np.sign(minus.amplitudes.real)
        assert np.all(signs[1:] == -signs[:-1])
        assert_allclose(np.diff(plus.centers), sm.SQRT_PI)

    def test_target_orthogonal_parities(self):
        assert abs(sm.overlap(sm.target_state('plus', 0.15), sm.target_state('minus', 0.15))) < 1e-6

    def test_target_momentum_matches_transform(self):
        position = sm.target_state('plus', 0.2)
        momentum = sm.target_momentum_state('plus', 0.2)
        assert sm.fidelity(sm.fourier(position), momentum) > 0.99

    def test_target_limits(self, caplog):
        with pytest.raises(DomainError):
            sm.target_state('plus', 0.2, q0=1.0)
        with pytest.raises(DomainError):
            sm.target_state('sideways', 0.2)
        with caplog.at_level(logging.WARNING):
            sm.target_state('plus', 0.6)
        assert 'not small' in caplog.text

    def test_matched_target_fidelity(self):
        params = EncodingParams.symmetric_for(4)
        assert sm.fidelity(sm.resource_state(params, 4), sm.matched_target(params, 4)) > 0.9

    def test_half_integer_matched_target(self):
        params = EncodingParams.symmetric_for('9/2')
        target = sm.matched_target(params, '9/2')
        assert sm.fidelity(sm.resource_state(params, '9/2'), target) > 0.9


class TestApproximations:

    def test_envelope_variances_symmetric(self):
        params = EncodingParams.symmetric_for(10)
        spike_q, env_q, spike_p, env_p = sm.envelope_variances(params)
        assert spike_q * env_q == pytest.approx(1.0)
        assert env_p == pytest.approx(math.pi * 10 / 2)
        assert spike_p == pytest.approx(2 / (math.pi * 10), rel=0.1)

    def test_approximate_position_state(self):
        params = EncodingParams.symmetric_for(16)
        assert sm.fidelity(sm.approximate_resource_state(params, -16), sm.resource_state(params, -16)) > 0.99

    def test_approximate_momentum_state(self):
        params = EncodingParams.symmetric_for(16)
        exact = sm.fourier(sm.resource_state(params, 16))
        assert sm.fidelity(sm.approximate_resource_momentum(params, 16), exact) > 0.95

    def test_approximate_x0_state(self):
        params = EncodingParams.symmetric_for(16)
        assert sm.fidelity(sm.approximate_x0_state(params), sm.x0_logical_state(params)) > 0.95

    def test_approximate_x0_momentum_normalized(self):
        params = EncodingParams.symmetric_for(8)
        state = sm.approximate_x0_momentum(params)
        assert state.quadrature is Quadrature.MOMENTUM
        assert sm.norm(state) == pytest.approx(1.0)

    def test_momentum_grid_resolves_peaks(self):
        params = EncodingParams.symmetric_for(8)
        grid = sm.momentum_grid(params)
        spike_p = sm.envelope_variances(params)[2]
        assert grid.step <= math.sqrt(spike_p / 2) / sm.POINTS_PER_STD * (1 + 1e-12)
        assert grid.max >= sm.COVERAGE_STDS * math.exp(params.r) * (1 - 1e-12)
