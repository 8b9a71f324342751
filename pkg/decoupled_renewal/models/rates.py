from typing import Any, Dict

from pydantic import PositiveFloat, root_validator

from decoupled_renewal.models.base import RenewalBaseModel

# Roundoff allowance on J >= 0 and on the conjugacy identity.
RATE_SLACK = 1e-9


class LegendreSolution(RenewalBaseModel):
    """
    The conjugate J(b) = sup_s (b s - f(s)) attained at s_b, where
    f'(s_b) = b.
    """

    b: PositiveFloat
    s_b: float
    rate: float
    f_at_s: float
    second_deriv: float

    @root_validator(skip_on_failure=True)
    def validate_conjugacy(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        expected = values["b"] * values["s_b"] - values["f_at_s"]
        if abs(values["rate"] - expected) > RATE_SLACK * max(1.0, abs(expected)):
            raise ValueError("rate must equal b*s_b - f(s_b)")
        if values["rate"] < -RATE_SLACK:
            raise ValueError(f"conjugate must be nonnegative, got {values['rate']}")
        return values

    def row(self) -> Dict[str, float]:
        """(b, s_b, J, f, f″) for rate tables."""
        return {
            "b": self.b,
            "s_b": self.s_b,
            "J": self.rate,
            "f": self.f_at_s,
            "f_second": self.second_deriv,
        }
