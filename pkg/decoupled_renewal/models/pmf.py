import math
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import NonNegativeFloat, validator
from scipy.special import logsumexp

from decoupled_renewal.errors import DomainError
from decoupled_renewal.models.base import ArrayBaseModel, RenewalBaseModel, frozen_array


class LogPMF(ArrayBaseModel):
    """
    log P{Y = k} for k = 0..k_max of a Poisson-binomial count Y, next to
    the moments Σ p_n and Σ p_n(1 - p_n) of the Bernoulli array it was
    computed from.
    """

    log_values: np.ndarray
    mean: float
    variance: NonNegativeFloat
    tail_bound: NonNegativeFloat = 0.0

    @validator("log_values", pre=True)
    def freeze_log_values(cls, value: Any) -> np.ndarray:
        array = frozen_array(value)
        if array.ndim != 1 or array.size == 0:
            raise ValueError("log_values must be a non-empty vector")
        return array

    @property
    def k_max(self) -> int:
        return int(self.log_values.size - 1)

    @property
    def probabilities(self) -> np.ndarray:
        return np.exp(self.log_values)

    @property
    def log_normalization(self) -> float:
        return float(logsumexp(self.log_values))

    @property
    def pmf_mean(self) -> float:
        return float(np.dot(np.arange(self.k_max + 1), self.probabilities))

    @property
    def pmf_variance(self) -> float:
        support = np.arange(self.k_max + 1)
        return float(np.dot((support - self.pmf_mean) ** 2, self.probabilities))

    @property
    def mode(self) -> int:
        return int(np.argmax(self.log_values))

    def log_prob(self, k: int) -> float:
        if k < 0:
            return -math.inf
        if k > self.k_max:
            raise DomainError(f"k={k} lies beyond the computed range k_max={self.k_max}")
        return float(self.log_values[k])

    def rows(self) -> List[Dict[str, float]]:
        """(k, log_prob) rows for export."""
        return [{"k": k, "log_prob": float(v)} for k, v in enumerate(self.log_values)]


class DominantConfiguration(RenewalBaseModel):
    """
    log of Π_{n<=m} p_n · Π_{j>m} (1 - p_j): the probability that exactly
    the first m indicators fire. When a factor vanishes, log_value is -∞
    and vanishing_index names the first such n.
    """

    mcount: int
    log_value: float
    vanishing_index: Optional[int] = None
