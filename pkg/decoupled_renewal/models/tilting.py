import math
from typing import Any, Dict

import numpy as np
from pydantic import NonNegativeInt, conint, validator

from decoupled_renewal.models.base import ArrayBaseModel, RenewalBaseModel, frozen_array
from decoupled_renewal.models.marginals import WalkMarginals


class TiltedModel(ArrayBaseModel):
    """
    The Bernoulli array of a WalkMarginals under the exponential change
    of measure with parameter s:

        p̃_n = e^s p_n / ((e^s - 1) p_n + 1)
        ψ(s) = Σ log((e^s - 1) p_n + 1)

    The tilted indicators stay independent, so a TiltedModel can be fed
    back into the Poisson-binomial DP through `as_marginals`.
    """

    s: float
    base: WalkMarginals
    tilted_probs: np.ndarray
    tilted_complements: np.ndarray
    psi: float
    psi_prime: float
    psi_second: float

    @validator("tilted_probs", "tilted_complements", pre=True)
    def freeze_arrays(cls, value: Any) -> np.ndarray:
        return frozen_array(value)

    def as_marginals(self) -> WalkMarginals:
        # Under the tilt every p_n beyond the truncation grows by at most e^s.
        return WalkMarginals(
            t=self.base.t,
            probs=self.tilted_probs,
            complements=self.tilted_complements,
            tail_bound=self.base.tail_bound * max(1.0, math.exp(self.s)),
            eps_mass=max(self.base.eps_mass, self.base.eps_mass * math.exp(self.s)),
            method=self.base.method,
        )


class SeededSampler(RenewalBaseModel):
    """
    Addresses a reproducible random stream. Batch b of stream `stream`
    always draws from Philox(SeedSequence(seed, spawn_key=(stream, b))),
    whichever thread runs it.
    """

    seed: conint(ge=0, lt=2**64) = 0
    stream: NonNegativeInt = 0

    def generator(self, batch: int = 0) -> np.random.Generator:
        sequence = np.random.SeedSequence(self.seed, spawn_key=(self.stream, batch))
        return np.random.Generator(np.random.Philox(sequence))

    def child(self, stream: int) -> "SeededSampler":
        return SeededSampler(seed=self.seed, stream=stream)


class ImportanceSamplingEstimate(RenewalBaseModel):
    estimate: float
    stderr: float
    hits: NonNegativeInt
    n_samples: conint(gt=0)
    s: float
    no_hit: bool = False

    @property
    def hit_fraction(self) -> float:
        return self.hits / self.n_samples

    def row(self) -> Dict[str, float]:
        return {
            "estimate": self.estimate,
            "stderr": self.stderr,
            "hits": self.hits,
            "n_samples": self.n_samples,
            "s": self.s,
        }


class SampledValues(ArrayBaseModel):
    """Draws indexed by n = 1..len(values): decoupled partial sums or radii."""

    values: np.ndarray
    sampler: SeededSampler

    @validator("values", pre=True)
    def freeze_values(cls, value: Any) -> np.ndarray:
        return frozen_array(value)

    def count_below(self, t: float) -> int:
        return int(np.count_nonzero(self.values <= t))

    def rows(self):
        """(n, value) rows for export."""
        return [
            {"n": n, "value": float(v)} for n, v in enumerate(self.values, start=1)
        ]

