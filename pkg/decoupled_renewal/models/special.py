"""
Parameter types for the special-function kernel.
"""

import math

from pydantic import PositiveFloat, confloat

from decoupled_renewal.models.base import RenewalBaseModel


class StableSubordinatorLaw(RenewalBaseModel):
    """
    The drift-free stable subordinator W with
        -log E[exp(-z W(1))] = Γ(1-α) z^α,   z >= 0.
    """

    alpha: confloat(gt=0, lt=1)

    @property
    def laplace_constant(self) -> float:
        return math.gamma(1 - self.alpha)

    @property
    def kanter_scale(self) -> float:
        """
        W(1) = kanter_scale * S where E[exp(-z S)] = exp(-z^α).
        """
        return self.laplace_constant ** (1 / self.alpha)

    @property
    def inverse_mean(self) -> float:
        """E[W^←(1)], the normalization that turns W^←(1) into Z_α."""
        return 1 / (math.gamma(1 - self.alpha) * math.gamma(1 + self.alpha))


class MittagLefflerParams(RenewalBaseModel):
    a: PositiveFloat
    b: PositiveFloat
