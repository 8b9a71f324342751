"""
The law of N(t) = Σ_n 1{Ŝ_n <= t}, a sum of independent Bernoulli(p_n)
indicators, computed exactly in log scale.

The DP multiplies in one factor (1 - p_n) + p_n z of the probability
generating function at a time. Rows are kept as logarithms and combined
with numpy.logaddexp, so probabilities far below the row maximum (e^{-10^5}
and beyond) keep their relative accuracy.
"""
import math
from typing import Optional

import numpy as np
from injector import inject, singleton

from decoupled_renewal.app_config import ApplicationConfig
from decoupled_renewal.errors import DomainError
from decoupled_renewal.models.marginals import CertifiedValue, WalkMarginals
from decoupled_renewal.models.pmf import DominantConfiguration, LogPMF
from decoupled_renewal.util import AppLoggerMixIn, exact_sum
from decoupled_renewal.workers import raise_if_cancelled


def log_pmf_values(
    log_probs: np.ndarray, log_complements: np.ndarray, k_max: int
) -> np.ndarray:
    """log P{Y = k}, k = 0..k_max, for Y a sum of independent indicators."""
    row = np.full(k_max + 1, -np.inf)
    row[0] = 0.0
    reach = 0
    with np.errstate(invalid="ignore"):
        for lp, lq in zip(log_probs, log_complements):
            if lp == -np.inf:
                continue
            raise_if_cancelled()
            reach = min(reach + 1, k_max)
            stay = row[: reach + 1] + lq
            stay[1:] = np.logaddexp(stay[1:], row[:reach] + lp)
            row[: reach + 1] = stay
    return row


@singleton
class PoissonBinomialService(AppLoggerMixIn):
    @inject
    def __init__(self, config: ApplicationConfig):
        self.experiment_settings = config.experiment_settings

    def exact_log_pmf(self, marginals: WalkMarginals, k_max: Optional[int] = None) -> LogPMF:
        n_terms = marginals.n_terms
        k_max = n_terms if k_max is None else k_max
        if not 0 <= k_max <= n_terms:
            raise DomainError(f"k_max must lie in [0, {n_terms}], got {k_max}")
        log_values = log_pmf_values(marginals.log_probs, marginals.log_complements, k_max)
        return LogPMF(
            log_values=log_values,
            mean=exact_sum(marginals.probs),
            variance=exact_sum(marginals.probs * marginals.complements),
            tail_bound=marginals.tail_bound,
        )

    def log_pmf_from_probs(self, probs, k_max: Optional[int] = None) -> LogPMF:
        """exact_log_pmf for a plain vector of success probabilities."""
        probs = np.asarray(probs, dtype=float)
        if np.any(probs < 0) or np.any(probs > 1) or np.any(np.isnan(probs)):
            raise DomainError("success probabilities must lie in [0, 1]")
        k_max = probs.size if k_max is None else k_max
        with np.errstate(divide="ignore"):
            log_values = log_pmf_values(np.log(probs), np.log1p(-probs), k_max)
        return LogPMF(
            log_values=log_values,
            mean=exact_sum(probs),
            variance=exact_sum(probs * (1 - probs)),
        )

    @staticmethod
    def log_prob_zero(marginals: WalkMarginals) -> CertifiedValue:
        """
        log P{N(t) = 0} = Σ log(1 - p_n). The terms cut off beyond N add at
        most -Σ_{n>N} log(1 - p_n) <= tail/(1 - tail) in absolute value.
        """
        log_complements = marginals.log_complements
        tail = marginals.tail_bound
        if np.any(log_complements == -np.inf):
            return CertifiedValue(value=-math.inf, error_bar=0.0)
        return CertifiedValue(
            value=exact_sum(log_complements), error_bar=tail / (1 - tail)
        )

    @staticmethod
    def dominant_product(marginals: WalkMarginals, mcount: int) -> DominantConfiguration:
        """log of the probability that exactly the first `mcount` indicators fire."""
        if not 0 <= mcount <= marginals.n_terms:
            raise DomainError(f"mcount must lie in [0, {marginals.n_terms}], got {mcount}")
        factors = np.concatenate(
            [marginals.log_probs[:mcount], marginals.log_complements[mcount:]]
        )
        vanishing = np.flatnonzero(factors == -np.inf)
        if vanishing.size:
            return DominantConfiguration(
                mcount=mcount, log_value=-math.inf, vanishing_index=int(vanishing[0]) + 1
            )
        return DominantConfiguration(mcount=mcount, log_value=exact_sum(factors))

    def local_clt_error(self, marginals: WalkMarginals) -> float:
        """
        sup_k |σ P{Y = k} - φ((k - mean)/σ)| over k within mean ± span·σ,
        φ the standard normal density.
        """
        settings = self.experiment_settings
        mean = exact_sum(marginals.probs)
        variance = exact_sum(marginals.probs * marginals.complements)
        if variance <= settings.min_variance:
            raise DomainError(
                f"local CLT comparison needs a nondegenerate count, variance = {variance:.3e}"
            )
        sigma = math.sqrt(variance)
        lower = max(0, math.floor(mean - settings.clt_sigma_span * sigma))
        upper = min(marginals.n_terms, math.ceil(mean + settings.clt_sigma_span * sigma))
        pmf = self.exact_log_pmf(marginals, k_max=upper)
        k = np.arange(lower, upper + 1)
        scaled = sigma * np.exp(pmf.log_values[lower:])
        normal = np.exp(-0.5 * ((k - mean) / sigma) ** 2) / math.sqrt(2 * math.pi)
        return float(np.max(np.abs(scaled - normal)))
