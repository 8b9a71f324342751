from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import NonNegativeFloat, PositiveFloat, root_validator, validator

from decoupled_renewal.models.base import ArrayBaseModel, RenewalBaseModel, frozen_array
from decoupled_renewal.models.enum import MarginalsMethod

# Two enclosure midpoints may cross by roundoff only.
MONOTONICITY_SLACK = 1e-13


class CertifiedValue(RenewalBaseModel):
    """A computed quantity together with a bound on its truncation error."""

    value: float
    error_bar: NonNegativeFloat = 0.0


class WalkMarginals(ArrayBaseModel):
    """
    p_n(t) = P{S_n <= t} for n = 1..N, stored together with the
    complements P{S_n > t} (computed directly, not as 1 - p_n) and a
    certified bound on the mass Σ_{n>N} p_n(t) that was cut off.
    """

    t: PositiveFloat
    probs: np.ndarray
    complements: np.ndarray
    tail_bound: NonNegativeFloat
    eps_mass: PositiveFloat
    method: MarginalsMethod
    # Width of the [lower, upper] enclosure around each p_n (lattice only).
    enclosure_widths: Optional[np.ndarray] = None

    @validator("probs", "complements", "enclosure_widths", pre=True)
    def freeze_arrays(cls, value: Any) -> Optional[np.ndarray]:
        return None if value is None else frozen_array(value)

    @validator("probs")
    def validate_probs(cls, probs: np.ndarray) -> np.ndarray:
        if probs.ndim != 1 or probs.size == 0:
            raise ValueError("probs must be a non-empty vector")
        if np.any(probs < 0) or np.any(probs > 1) or np.any(np.isnan(probs)):
            raise ValueError("probs must lie in [0, 1]")
        if np.any(np.diff(probs) > MONOTONICITY_SLACK):
            raise ValueError("probs must be nonincreasing in n")
        return probs

    @root_validator(skip_on_failure=True)
    def validate_consistency(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        probs, complements = values["probs"], values["complements"]
        if complements.shape != probs.shape:
            raise ValueError("complements must match probs")
        if np.any(complements < 0) or np.any(complements > 1):
            raise ValueError("complements must lie in [0, 1]")
        widths = values.get("enclosure_widths")
        if widths is not None and widths.shape != probs.shape:
            raise ValueError("enclosure_widths must match probs")
        if values["tail_bound"] > values["eps_mass"]:
            raise ValueError(
                f"tail bound {values['tail_bound']:.3e} exceeds eps_mass {values['eps_mass']:.3e}"
            )
        return values

    @property
    def n_terms(self) -> int:
        return int(self.probs.size)

    @property
    def log_probs(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.probs)

    @property
    def log_complements(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.complements)

    def rows(self) -> List[Dict[str, float]]:
        """(n, p_n, enclosure_width) rows for export."""
        widths = (
            self.enclosure_widths
            if self.enclosure_widths is not None
            else np.zeros_like(self.probs)
        )
        return [
            {"n": n, "p_n": float(p), "enclosure_width": float(w)}
            for n, (p, w) in enumerate(zip(self.probs, widths), start=1)
        ]
