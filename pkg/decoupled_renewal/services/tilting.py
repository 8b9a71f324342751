"""
Exponential tilting of the decoupled count and the importance-sampling
estimator built on it.

Under the tilt with parameter s the indicators 1{Ŝ_n <= t} stay
independent with success probabilities e^s p_n / ((e^s - 1) p_n + 1), and

    P{Y = k} = exp(-s k + ψ(s)) · P^(s){Y = k}

for every s. The estimator samples Y under P^(s) with s chosen so that
the tilted mean ψ′(s) equals k, where hits are frequent.
"""
import math
from typing import NamedTuple, Optional

import numpy as np
from injector import inject, singleton

from decoupled_renewal.app_config import ApplicationConfig
from decoupled_renewal.errors import DomainError, RangeError
from decoupled_renewal.models.marginals import WalkMarginals
from decoupled_renewal.models.tilting import (
    ImportanceSamplingEstimate,
    SeededSampler,
    TiltedModel,
)
from decoupled_renewal.services.solvers import NumericalSolver
from decoupled_renewal.util import AppLoggerMixIn, exact_sum
from decoupled_renewal.workers import WorkerPool, raise_if_cancelled

# e^s must stay finite.
MAX_TILT = 700.0


class Cumulants(NamedTuple):
    psi: float
    psi_prime: float
    psi_second: float
    log_tilted_probs: np.ndarray
    log_tilted_complements: np.ndarray


def tilted_cumulants(marginals: WalkMarginals, s: float) -> Cumulants:
    """
    ψ(s) = Σ log(q_n + e^s p_n) and its first two derivatives. Each term is
    a logaddexp of log q_n and s + log p_n, so no e^s - 1 is ever formed.
    """
    log_probs, log_complements = marginals.log_probs, marginals.log_complements
    with np.errstate(invalid="ignore"):
        log_norms = np.logaddexp(log_complements, s + log_probs)
        log_tilted = s + log_probs - log_norms
        log_tilted_complements = log_complements - log_norms
    tilted, tilted_complements = np.exp(log_tilted), np.exp(log_tilted_complements)
    return Cumulants(
        psi=exact_sum(log_norms),
        psi_prime=exact_sum(tilted),
        psi_second=exact_sum(tilted * tilted_complements),
        log_tilted_probs=log_tilted,
        log_tilted_complements=log_tilted_complements,
    )


@singleton
class TiltingService(AppLoggerMixIn):
    @inject
    def __init__(self, config: ApplicationConfig, solver: NumericalSolver):
        self.sampler_settings = config.sampler_settings
        self.solver = solver

    def tilt(self, marginals: WalkMarginals, s: float) -> TiltedModel:
        if not math.isfinite(s):
            raise DomainError(f"tilt parameter must be finite, got {s}")
        if abs(s) > MAX_TILT:
            raise RangeError(f"|s| = {abs(s):g} exceeds the overflow guard {MAX_TILT:g}")
        if s == 0:
            return TiltedModel(
                s=0.0,
                base=marginals,
                tilted_probs=marginals.probs,
                tilted_complements=marginals.complements,
                psi=0.0,
                psi_prime=exact_sum(marginals.probs),
                psi_second=exact_sum(marginals.probs * marginals.complements),
            )
        cumulants = tilted_cumulants(marginals, s)
        return TiltedModel(
            s=s,
            base=marginals,
            tilted_probs=np.minimum.accumulate(np.exp(cumulants.log_tilted_probs)),
            tilted_complements=np.exp(cumulants.log_tilted_complements),
            psi=cumulants.psi,
            psi_prime=cumulants.psi_prime,
            psi_second=cumulants.psi_second,
        )

    def saddlepoint(self, marginals: WalkMarginals, k: int) -> float:
        """The s with ψ′(s) = k."""
        certain = int(np.count_nonzero(marginals.complements == 0))
        possible = int(np.count_nonzero(marginals.probs > 0))
        if not (0 < k < marginals.n_terms and certain < k < possible):
            raise DomainError(
                f"saddlepoint needs max(0, #certain={certain}) < k < "
                f"min(N={marginals.n_terms}, #possible={possible}), got k={k}"
            )

        def excess(s: float) -> float:
            return tilted_cumulants(marginals, s).psi_prime - k

        def slope(s: float) -> float:
            return tilted_cumulants(marginals, s).psi_second

        start = excess(0.0)
        if start == 0:
            return 0.0
        lower, upper = self.solver.expand_bracket(excess, 0.0, -1 if start > 0 else 1)
        return self.solver.safeguarded_newton(excess, slope, lower, upper)

    def is_log_prob(
        self,
        marginals: WalkMarginals,
        k: int,
        n_samples: int,
        sampler: SeededSampler,
        s: Optional[float] = None,
        threads: int = 1,
    ) -> ImportanceSamplingEstimate:
        """
        Estimates log P{Y = k} as -s k + ψ(s) + log(fraction of tilted
        samples with Y = k). Samples are drawn in batches; batch b always
        uses the generator addressed by (seed, stream, b), so the result
        does not depend on `threads`.
        """
        if n_samples < self.sampler_settings.min_samples:
            raise DomainError(
                f"n_samples must be at least {self.sampler_settings.min_samples}, got {n_samples}"
            )
        if s is None:
            s = self.saddlepoint(marginals, k)
        model = self.tilt(marginals, s)
        batch_size = self.sampler_settings.batch_size
        sizes = [
            min(batch_size, n_samples - start) for start in range(0, n_samples, batch_size)
        ]

        def count_hits(batch: int) -> int:
            generator = sampler.generator(batch)
            counts = np.zeros(sizes[batch], dtype=np.int64)
            raise_if_cancelled()
            for probability in model.tilted_probs:
                counts += generator.random(sizes[batch]) < probability
            return int(np.count_nonzero(counts == k))

        with WorkerPool(max_workers=min(max(1, threads), len(sizes)), name="is-batch") as pool:
            hits = sum(pool.map(count_hits, range(len(sizes))))

        if hits == 0:
            self.logger.warning(
                f"no tilted sample hit k={k} in {n_samples} draws at s={s:.6g}; "
                f"increase n_samples"
            )
            return ImportanceSamplingEstimate(
                estimate=-math.inf,
                stderr=math.inf,
                hits=0,
                n_samples=n_samples,
                s=s,
                no_hit=True,
            )
        fraction = hits / n_samples
        return ImportanceSamplingEstimate(
            estimate=-s * k + model.psi + math.log(fraction),
            stderr=math.sqrt((1 - fraction) / (n_samples * fraction)),
            hits=hits,
            n_samples=n_samples,
            s=s,
        )
