import math

import numpy as np
import pytest

from decoupled_renewal.errors import DomainError, UnavailableError
from decoupled_renewal.models.steps import GammaStep, ParetoStep, SqrtExpStep, WeibullTypeStep
from decoupled_renewal.models.tilting import SeededSampler
from decoupled_renewal.services.convolution import ConvolutionEngine
from decoupled_renewal.services.poisson_binomial import PoissonBinomialService
from decoupled_renewal.services.sampler import DecoupledWalkSampler


class TestDecoupledWalkSampler:
    @pytest.fixture(autouse=True)
    def initialize(self, injector, sampler):
        self.walks = injector.get(DecoupledWalkSampler)
        self.engine = injector.get(ConvolutionEngine)
        self.pmf = injector.get(PoissonBinomialService)
        self.sampler = sampler

    def test_deterministic(self):
        step = WeibullTypeStep(exponent=0.5)
        first = self.walks.sample_decoupled_walk(step, 20, self.sampler)
        second = self.walks.sample_decoupled_walk(step, 20, self.sampler)
        np.testing.assert_array_equal(first.values, second.values)
        assert len(first.rows()) == 20

    def test_first_step_mean(self):
        step = GammaStep(shape=1.5)
        draws = np.array(
            [
                self.walks.sample_decoupled_walk(step, 1, self.sampler.child(stream)).values[0]
                for stream in range(2000)
            ]
        )
        assert abs(draws.mean() - step.mean) <= 4 * math.sqrt(step.variance / draws.size)

    @pytest.mark.parametrize(
        "step, n, t",
        [(GammaStep(shape=1), 5, 5.0), (ParetoStep(tail_index=2.5), 3, 5.0)],
    )
    def test_marginal_probability(self, step, n, t):
        runs = 4000
        hits = sum(
            self.walks.sample_decoupled_walk(step, n, self.sampler.child(stream)).values[n - 1] <= t
            for stream in range(runs)
        )
        p = float(self.engine.marginals(step, t, n_min=n).probs[n - 1])
        assert abs(hits / runs - p) <= 4 * math.sqrt(p * (1 - p) / runs) + 0.01

    def test_not_samplable(self):
        with pytest.raises(UnavailableError):
            self.walks.sample_decoupled_walk(SqrtExpStep(), 3, self.sampler)

    def test_n_max_domain(self):
        with pytest.raises(DomainError):
            self.walks.sample_decoupled_walk(GammaStep(shape=1), 0, self.sampler)

    def test_ginibre_radii_are_exponential_walk(self):
        radii = self.walks.sample_radii(2.0, 10, self.sampler)
        walk = self.walks.sample_decoupled_walk(GammaStep(shape=1), 10, self.sampler)
        np.testing.assert_allclose(radii.values**2, walk.values, rtol=1e-12)

    def test_no_radius_below(self):
        runs, t = 200_000, 2.0
        counts = self.walks.radii_counts(2.0, t, 40, runs, self.sampler)
        marginals = self.engine.marginals_exact_gamma(1.0, t**2)
        p = math.exp(self.pmf.log_prob_zero(marginals).value)
        empirical = np.mean(counts == 0)
        assert abs(empirical - p) <= 4 * math.sqrt(p * (1 - p) / runs)

    def test_counts_follow_exact_pmf(self):
        runs, rho, t = 50_000, 1.0, 6.0
        marginals = self.engine.marginals_exact_gamma(2 / rho, t**rho)
        pmf = self.pmf.exact_log_pmf(marginals)
        counts = self.walks.radii_counts(rho, t, marginals.n_terms, runs, self.sampler)
        observed = np.bincount(counts, minlength=pmf.k_max + 1)[: pmf.k_max + 1]
        expected = runs * pmf.probabilities
        kept = expected >= 5
        chi_square = np.sum((observed[kept] - expected[kept]) ** 2 / expected[kept])
        # 99.9% quantile of chi-square with at most 10 degrees of freedom
        assert kept.sum() <= 11
        assert chi_square < 29.6

    def test_radii_domain(self):
        with pytest.raises(DomainError):
            self.walks.sample_radii(0, 5, self.sampler)
        with pytest.raises(DomainError):
            self.walks.radii_counts(2.0, 0, 5, 10, self.sampler)

    def test_seeds_reproduce_counts(self):
        first = self.walks.radii_counts(2.0, 3.0, 20, 25_000, SeededSampler(seed=9))
        second = self.walks.radii_counts(2.0, 3.0, 20, 25_000, SeededSampler(seed=9))
        np.testing.assert_array_equal(first, second)
