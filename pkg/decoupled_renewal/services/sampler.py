import numpy as np
from injector import inject, singleton

from decoupled_renewal.app_config import ApplicationConfig
from decoupled_renewal.errors import DomainError, UnavailableError
from decoupled_renewal.models.steps import GammaStep, StepDistribution
from decoupled_renewal.models.tilting import SampledValues, SeededSampler
from decoupled_renewal.util import AppLoggerMixIn
from decoupled_renewal.workers import raise_if_cancelled


@singleton
class DecoupledWalkSampler(AppLoggerMixIn):
    """
    Draws the decoupled walk (Ŝ_n), where each Ŝ_n has the law of S_n but
    distinct n are independent, and the radii (Ŝ_n)^{1/ρ} of the
    ρ-Mittag-Leffler ensemble built from gamma(2/ρ) steps.
    """

    @inject
    def __init__(self, config: ApplicationConfig):
        self.sampler_settings = config.sampler_settings

    def sample_decoupled_walk(
        self, step: StepDistribution, n_max: int, sampler: SeededSampler
    ) -> SampledValues:
        if not step.samplable:
            raise UnavailableError(f"{step.describe()} is not samplable")
        if n_max < 1:
            raise DomainError(f"n_max must be positive, got {n_max}")
        generator = sampler.generator()
        if isinstance(step, GammaStep):
            values = generator.gamma(step.shape * np.arange(1, n_max + 1))
        else:
            values = np.array(
                [step.sample_partial_sum(generator, n, 1)[0] for n in range(1, n_max + 1)]
            )
        return SampledValues(values=values, sampler=sampler)

    def sample_radii(self, rho: float, n_max: int, sampler: SeededSampler) -> SampledValues:
        if not rho > 0:
            raise DomainError(f"rho must be positive, got {rho}")
        walk = self.sample_decoupled_walk(GammaStep(shape=2 / rho), n_max, sampler)
        return SampledValues(values=walk.values ** (1 / rho), sampler=sampler)

    def radii_counts(
        self, rho: float, t: float, n_max: int, runs: int, sampler: SeededSampler
    ) -> np.ndarray:
        """
        #{n <= n_max : radius_n <= t} for `runs` independent ensembles,
        drawn in batches addressed by (seed, stream, batch).
        """
        if not rho > 0 or not t > 0:
            raise DomainError(f"radii counts need rho > 0 and t > 0, got ({rho}, {t})")
        shapes = (2 / rho) * np.arange(1, n_max + 1)
        level = t**rho
        counts = np.empty(runs, dtype=np.int64)
        batch_size = self.sampler_settings.batch_size
        for batch, start in enumerate(range(0, runs, batch_size)):
            size = min(batch_size, runs - start)
            raise_if_cancelled()
            # radius_n <= t exactly when Ŝ_n <= t^ρ
            draws = sampler.generator(batch).gamma(shapes, size=(size, n_max))
            counts[start : start + size] = np.count_nonzero(draws <= level, axis=1)
        return counts
