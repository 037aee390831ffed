"""Spin measurement: priors, Kraus operators, outcome and success probabilities."""
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

import measurement as ms
import state_model as sm
from errors import DomainError, InvalidIndex, ZeroProbabilityOutcome
from spin_algebra import TotalSpin, d_matrix, outcomes
from state_model import EncodingParams


class TestPriors:

    def test_coherent_prior_is_top_column(self):
        prior = ms.coherent_prior(3)
        assert_allclose(prior.coefficients.real, d_matrix(TotalSpin(6))[:, -1], atol=1e-15)

    def test_basis_prior(self):
        prior = ms.basis_prior('3/2', '-1/2')
        assert_allclose(prior.coefficients, [0, 1, 0, 0])

    def test_wrong_length(self):
        with pytest.raises(InvalidIndex):
            ms.SpinPrior(TotalSpin(2), np.ones(2))

    def test_not_normalized(self):
        with pytest.raises(DomainError):
            ms.SpinPrior(TotalSpin(2), np.ones(3))
        assert ms.SpinPrior.normalized(1, np.ones(3)).coefficients[0] == pytest.approx(1 / math.sqrt(3))

    def test_coefficients_frozen(self):
        prior = ms.coherent_prior(2)
        with pytest.raises(ValueError):
            prior.coefficients[0] = 1.0


class TestKraus:

    @pytest.mark.parametrize("j, x", [('4', '4'), ('4', '-1'), ('7/2', '-7/2'), ('2', '0')])
    def test_coherent_prior_on_squeezed_vacuum(self, j, x):
        params = EncodingParams.symmetric_for(j)
        probability, state = ms.apply_kraus(ms.coherent_prior(j), x, sm.squeezed_state(params.r), params.g)
        assert probability == pytest.approx(sm.conditional_probability(params, x), rel=1e-10)
        assert sm.fidelity(state, sm.conditional_position_state(params, x)) == pytest.approx(1.0, abs=1e-10)
        assert sm.norm(state) == pytest.approx(1.0)

    def test_kraus_terms(self):
        terms = ms.kraus_amplitudes(ms.basis_prior(2, 1), 2, g=2.0)
        assert len(terms) == 1
        assert terms[0].shift == pytest.approx(2.0)
        assert terms[0].amplitude == pytest.approx(d_matrix(TotalSpin(4))[3, 4])

    def test_zero_probability(self):
        # d_{0,0} vanishes for J = 1
        with pytest.raises(ZeroProbabilityOutcome):
            ms.apply_kraus(ms.basis_prior(1, 0), 0, sm.squeezed_state(0.0))

    def test_completeness(self):
        for j in ('1/2', 3, '11/2', 10):
            assert ms.kraus_completeness_defect(j) < 1e-12

    def test_mixture_with_one_branch(self):
        params = EncodingParams.symmetric_for(3)
        prior = ms.coherent_prior(3)
        vacuum = sm.squeezed_state(params.r)
        total, branches = ms.condition_mixture(prior, 3, [(1.0, vacuum)])
        probability, state = ms.apply_kraus(prior, 3, vacuum)
        assert total == pytest.approx(probability)
        assert branches[0][0] == pytest.approx(1.0)
        assert sm.fidelity(branches[0][1], state) == pytest.approx(1.0)

    def test_mixture_weights(self):
        prior = ms.coherent_prior(2)
        branches = [(0.25, sm.squeezed_state(0.5)), (0.75, sm.squeezed_state(0.5, center=0.3))]
        total, conditioned = ms.condition_mixture(prior, 2, branches)
        singles = [ms.apply_kraus(prior, 2, comb)[0] for _, comb in branches]
        assert total == pytest.approx(0.25 * singles[0] + 0.75 * singles[1])
        assert sum(w for w, _ in conditioned) == pytest.approx(1.0)

    def test_mixture_weights_validated(self):
        with pytest.raises(DomainError):
            ms.condition_mixture(ms.coherent_prior(1), 1, [(0.5, sm.squeezed_state(0.0))])


class TestOutcomeProbabilities:

    def test_matches_conditional_norm(self):
        params = EncodingParams.symmetric_for(3)
        for x in outcomes(params.j):
            assert ms.outcome_probability(params, None, x) == pytest.approx(
                sm.conditional_probability(params, x), abs=1e-14)

    @pytest.mark.parametrize("j, r, g", [('1/2', 0.0, 1.0), ('5', -0.3, 2.5), ('17/2', 1.4, 0.7), ('20', 0.9, 1.77)])
    def test_distribution_sums_to_one(self, j, r, g):
        assert ms.outcome_distribution(EncodingParams(j, r, g)).total == pytest.approx(1.0, abs=1e-10)

    def test_spin_half_two_outcomes(self):
        distribution = ms.outcome_distribution(EncodingParams.symmetric_for('1/2'))
        assert len(distribution.probs) == 2
        assert distribution.probs.sum() == pytest.approx(1.0)

    def test_basis_prior_gives_squared_elements(self):
        params = EncodingParams.symmetric_for(2)
        prior = ms.basis_prior(2, 1)
        table = d_matrix(TotalSpin(4))
        for i, x in enumerate(outcomes(params.j)):
            assert ms.outcome_probability(params, prior, x) == pytest.approx(table[3, i] ** 2, abs=1e-15)

    def test_prior_spin_must_match(self):
        with pytest.raises(InvalidIndex):
            ms.outcome_probability(EncodingParams.symmetric_for(2), ms.coherent_prior(3), 0)

    @pytest.mark.slow
    def test_endpoints_most_probable_at_fifty(self):
        distribution = ms.outcome_distribution(EncodingParams.symmetric_for(50))
        assert set(distribution.most_probable(2)) == {50, -50}


class TestSuccessProbability:

    def test_spin_half(self):
        assert ms.success_probability('1/2') == pytest.approx(1.0)
        assert ms.success_probability('1/2', 'closed_binomial') == pytest.approx(1.0)

    def test_spin_one_closed_value(self):
        expected = 0.75 + 0.25 * math.exp(-math.pi ** 2 / 2)
        assert ms.success_probability(1) == pytest.approx(expected, rel=1e-13)

    @pytest.mark.parametrize("two_j", range(1, 41))
    def test_asymptotic_within_bound(self, two_j):
        j = TotalSpin(two_j)
        exact = ms.success_probability(j)
        assert ms.success_probability(j, 'asymptotic') == pytest.approx(exact, rel=0.013)
        closed = ms.success_probability(j, 'closed_binomial')
        assert exact >= closed or exact == pytest.approx(closed, rel=1e-13)

    def test_endpoint_sum(self):
        j = TotalSpin(9)
        total = ms.endpoint_probability(j, 1) + ms.endpoint_probability(j, -1)
        assert total == pytest.approx(ms.success_probability(j))

    def test_endpoint_matches_distribution(self):
        params = EncodingParams.symmetric_for(5)
        distribution = ms.outcome_distribution(params)
        assert ms.endpoint_probability(params.j, -1) == pytest.approx(distribution.probability(-5), rel=1e-12)

    def test_neighbor_approximation(self):
        for sign in (1, -1):
            assert ms.endpoint_probability(10, sign, 'neighbor') == pytest.approx(
                ms.endpoint_probability(10, sign), rel=1e-12)

    def test_grouped_series_matches_double_sum(self):
        for two_j in (1, 4, 7, 12):
            for sign in (1, -1):
                assert ms._endpoint_series(two_j / 2, sign) == pytest.approx(
                    ms.endpoint_probability(TotalSpin(two_j), sign), rel=1e-12)

    def test_continuous_spin(self):
        j = 2 / math.pi * 10
        assert ms.success_probability(j) == pytest.approx(ms.success_probability(j, 'asymptotic'), rel=0.013)

    def test_from_db(self):
        assert ms.success_probability_from_db(10) == pytest.approx(0.3131, abs=1e-4)
        assert ms.success_probability_from_db(20) == pytest.approx(0.0999, abs=1e-4)

    def test_iterated_scheme(self):
        assert ms.iterated_scheme_probability('1/2') == 1.0
        assert ms.iterated_scheme_probability(4) == pytest.approx(2 ** -7)

    def test_domain(self):
        with pytest.raises(DomainError):
            ms.success_probability(0.25)
        with pytest.raises(DomainError):
            ms.endpoint_probability(2, 0)
        with pytest.raises(ValueError):
            ms.success_probability(2, 'guess')


class TestSweep:

    def test_rows_in_input_order(self):
        js = [4.0, 0.5, 2.5]
        rows = ms.probability_sweep(js=js, workers=3)
        assert [row['j'] for row in rows] == js
        assert set(rows[0]) == {'j', 'db', 'p_exact', 'p_closed', 'p_asymptotic', 'p_iterated'}

    def test_db_sweep_with_progress(self):
        calls = []
        rows = ms.probability_sweep(dbs=[0.0, 5.0, 10.0], workers=2, progress=lambda: calls.append(1))
        assert len(calls) == 3
        assert rows[2]['j'] == pytest.approx(20 / math.pi)
        assert rows[2]['p_asymptotic'] == pytest.approx(ms.success_probability_from_db(10.0))

    def test_needs_exactly_one_sweep(self):
        with pytest.raises(DomainError):
            ms.probability_sweep()
        with pytest.raises(DomainError):
            ms.probability_sweep(js=[1.0], dbs=[1.0])
