"""
The step laws ξ of the underlying random walk. Each family is an
immutable pydantic model carrying its own distribution function, tail,
Laplace data and sampler; `step_from_config` builds one from the
{family, parameters} map used in experiment configs.

Laplace transforms are written Λ(s) = E[exp(sξ)], so heavy and
semi-exponential families are finite on s <= 0 only.
"""

import math
from typing import Any, ClassVar, Dict, Literal, Mapping, Optional, Type, Union

import numpy as np
from pydantic import PositiveFloat, confloat, validator
from scipy import integrate, special

from decoupled_renewal.errors import DomainError, UnavailableError
from decoupled_renewal.models.base import RenewalBaseModel
from decoupled_renewal.models.enum import TailClass

ArrayLike = Union[float, np.ndarray]

# Partial sums of heavy-tailed steps are drawn in chunks of this many variates.
_SAMPLE_CHUNK = 1 << 20


def _as_output(values: np.ndarray, like: ArrayLike) -> ArrayLike:
    return float(values) if np.ndim(like) == 0 else values


def _nonnegative(x: ArrayLike) -> np.ndarray:
    array = np.asarray(x, dtype=float)
    if np.any(array < 0) or np.any(np.isnan(array)):
        raise DomainError("step distribution functions require x >= 0")
    return array


class TailValue(RenewalBaseModel):
    value: float
    # True when only the asymptotic equivalent of P{ξ > t} is known.
    asymptotic: bool = False


class LightTailAnalysis(RenewalBaseModel):
    """
    moment_bound:  B = sup{s >= 0 : Λ(s) < ∞}
    slope_limit:   A_0 = lim_{s -> B-} m(s), m = Λ'/Λ  (may be +∞)
    domain:        human-readable description of D = {s >= 0 : Λ(s) < ∞}
    """

    moment_bound: float
    slope_limit: float
    domain: str

    @validator("moment_bound")
    def validate_moment_bound(cls, value: float) -> float:
        if value < 0:
            raise ValueError("B must be nonnegative")
        return value


class StepDistribution(RenewalBaseModel):
    family: str

    parameter_fields: ClassVar[tuple] = ()

    # Distribution function, tail

    def cdf(self, x: ArrayLike) -> ArrayLike:
        raise NotImplementedError

    def sf(self, x: ArrayLike) -> ArrayLike:
        """Exact P{ξ > x}, computed without cancellation."""
        raise NotImplementedError

    def tail(self, t: float) -> TailValue:
        if not t > 0:
            raise DomainError(f"tail requires t > 0, got {t}")
        return TailValue(value=float(self.sf(t)))

    @property
    def has_cdf(self) -> bool:
        return True

    @property
    def support_infimum(self) -> float:
        return 0.0

    def has_mass_below(self, x: float) -> bool:
        """Whether P{ξ <= x} > 0."""
        return x > self.support_infimum

    # Laplace side

    def laplace(self, s: float) -> float:
        raise NotImplementedError

    def log_laplace(self, s: float) -> float:
        value = self.laplace(s)
        return math.log(value) if value < math.inf else math.inf

    def cumulant_slope(self, s: float) -> float:
        """m(s) = Λ'(s)/Λ(s)."""
        raise NotImplementedError

    def light_tail_analysis(self) -> LightTailAnalysis:
        return LightTailAnalysis(
            moment_bound=0.0, slope_limit=self.mean, domain="{0}"
        )

    # Moments and tail class

    @property
    def mean(self) -> float:
        raise NotImplementedError

    @property
    def variance(self) -> float:
        raise NotImplementedError

    @property
    def tail_class(self) -> TailClass:
        raise NotImplementedError

    @property
    def regular_variation_index(self) -> Optional[float]:
        """α in P{ξ > t} ~ t^{-α} ℓ(t) for regularly varying tails, else None."""
        return None

    # Sampling

    @property
    def samplable(self) -> bool:
        return True

    def sample(self, generator: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    def sample_partial_sum(
        self, generator: np.random.Generator, n: int, size: int
    ) -> np.ndarray:
        """`size` independent copies of S_n = ξ_1 + ... + ξ_n."""
        total = np.zeros(size)
        rows_per_chunk = max(1, _SAMPLE_CHUNK // max(1, size))
        remaining = n
        while remaining > 0:
            rows = min(rows_per_chunk, remaining)
            total += self.sample(generator, rows * size).reshape(rows, size).sum(axis=0)
            remaining -= rows
        return total

    # Config

    def to_config(self) -> Dict[str, Any]:
        return {
            "family": self.family,
            "parameters": {
                name: getattr(self, name) for name in self.parameter_fields
            },
        }

    def describe(self) -> str:
        parameters = ", ".join(
            f"{name}={getattr(self, name):g}" for name in self.parameter_fields
        )
        return f"{self.family}({parameters})"


class GammaStep(StepDistribution):
    """Gamma(shape, 1); shape 2/ρ gives the radii of the ρ-Mittag-Leffler ensemble."""

    family: Literal["gamma"] = "gamma"
    shape: PositiveFloat

    parameter_fields: ClassVar[tuple] = ("shape",)

    def cdf(self, x: ArrayLike) -> ArrayLike:
        return _as_output(special.gammainc(self.shape, _nonnegative(x)), x)

    def sf(self, x: ArrayLike) -> ArrayLike:
        return _as_output(special.gammaincc(self.shape, _nonnegative(x)), x)

    def laplace(self, s: float) -> float:
        if s >= 1:
            return math.inf
        return (1 - s) ** (-self.shape)

    def log_laplace(self, s: float) -> float:
        if s >= 1:
            return math.inf
        return -self.shape * math.log1p(-s)

    def cumulant_slope(self, s: float) -> float:
        if s >= 1:
            return math.inf
        return self.shape / (1 - s)

    def light_tail_analysis(self) -> LightTailAnalysis:
        return LightTailAnalysis(moment_bound=1.0, slope_limit=math.inf, domain="[0, 1)")

    @property
    def mean(self) -> float:
        return self.shape

    @property
    def variance(self) -> float:
        return self.shape

    @property
    def tail_class(self) -> TailClass:
        return TailClass.light

    def sample(self, generator: np.random.Generator, size: int) -> np.ndarray:
        return generator.gamma(self.shape, size=size)

    def sample_partial_sum(
        self, generator: np.random.Generator, n: int, size: int
    ) -> np.ndarray:
        return generator.gamma(n * self.shape, size=size)


class ParetoStep(StepDistribution):
    """P{ξ > x} = (scale/x)^tail_index for x >= scale."""

    family: Literal["pareto"] = "pareto"
    tail_index: PositiveFloat
    scale: PositiveFloat = 1.0

    parameter_fields: ClassVar[tuple] = ("tail_index", "scale")

    def cdf(self, x: ArrayLike) -> ArrayLike:
        array = _nonnegative(x)
        with np.errstate(divide="ignore"):
            values = np.where(
                array >= self.scale, -np.expm1(self.tail_index * np.log(self.scale / array)), 0.0
            )
        return _as_output(values, x)

    def sf(self, x: ArrayLike) -> ArrayLike:
        array = _nonnegative(x)
        with np.errstate(divide="ignore"):
            values = np.where(
                array >= self.scale, np.exp(self.tail_index * np.log(self.scale / array)), 1.0
            )
        return _as_output(values, x)

    @property
    def support_infimum(self) -> float:
        return self.scale

    def _shifted_moment(self, s: float, power: float) -> float:
        # ∫_0^∞ exp(-c v) (1+v)^{-power} dv with c = -s·scale > 0
        rate = -s * self.scale
        value, _ = integrate.quad(
            lambda v: math.exp(-rate * v) * (1 + v) ** (-power),
            0.0,
            math.inf,
            epsabs=0.0,
            epsrel=1e-12,
            limit=500,
        )
        return value

    def laplace(self, s: float) -> float:
        if s > 0:
            return math.inf
        if s == 0:
            return 1.0
        return (
            self.tail_index
            * math.exp(s * self.scale)
            * self._shifted_moment(s, self.tail_index + 1)
        )

    def log_laplace(self, s: float) -> float:
        if s > 0:
            return math.inf
        if s == 0:
            return 0.0
        return (
            math.log(self.tail_index)
            + s * self.scale
            + math.log(self._shifted_moment(s, self.tail_index + 1))
        )

    def cumulant_slope(self, s: float) -> float:
        if s > 0:
            return math.inf
        if s == 0:
            return self.mean
        return (
            self.scale
            * self._shifted_moment(s, self.tail_index)
            / self._shifted_moment(s, self.tail_index + 1)
        )

    @property
    def mean(self) -> float:
        if self.tail_index <= 1:
            return math.inf
        return self.tail_index * self.scale / (self.tail_index - 1)

    @property
    def variance(self) -> float:
        a = self.tail_index
        if a <= 2:
            return math.inf
        return self.scale**2 * a / ((a - 1) ** 2 * (a - 2))

    @property
    def tail_class(self) -> TailClass:
        if self.tail_index > 1:
            return TailClass.regular_finite_mean
        return TailClass.regular_infinite_mean

    @property
    def regular_variation_index(self) -> Optional[float]:
        return self.tail_index

    def sample(self, generator: np.random.Generator, size: int) -> np.ndarray:
        # numpy's pareto is the Lomax law, i.e. shifted to start at 0.
        return self.scale * (1.0 + generator.pareto(self.tail_index, size=size))


class WeibullTypeStep(StepDistribution):
    """-log P{ξ > t} = H(t) = scale · t^exponent with exponent in (0, 1)."""

    family: Literal["weibull"] = "weibull"
    exponent: confloat(gt=0, lt=1)
    scale: PositiveFloat = 1.0

    parameter_fields: ClassVar[tuple] = ("exponent", "scale")

    def hazard(self, t: ArrayLike) -> ArrayLike:
        return self.scale * np.power(t, self.exponent)

    def cdf(self, x: ArrayLike) -> ArrayLike:
        return _as_output(-np.expm1(-self.hazard(_nonnegative(x))), x)

    def sf(self, x: ArrayLike) -> ArrayLike:
        return _as_output(np.exp(-self.hazard(_nonnegative(x))), x)

    def _laplace_moment(self, s: float, power: int) -> float:
        # E[ξ^power e^{sξ}] with ξ = (V/scale)^{1/exponent}, V unit exponential
        inverse = 1 / self.exponent

        def integrand(v: float) -> float:
            x = (v / self.scale) ** inverse
            return math.exp(-v + s * x) * x**power

        value, _ = integrate.quad(
            integrand, 0.0, math.inf, epsabs=0.0, epsrel=1e-12, limit=500
        )
        return value

    def laplace(self, s: float) -> float:
        if s > 0:
            return math.inf
        if s == 0:
            return 1.0
        return self._laplace_moment(s, 0)

    def cumulant_slope(self, s: float) -> float:
        if s > 0:
            return math.inf
        if s == 0:
            return self.mean
        return self._laplace_moment(s, 1) / self._laplace_moment(s, 0)

    @property
    def mean(self) -> float:
        inverse = 1 / self.exponent
        return self.scale ** (-inverse) * math.gamma(1 + inverse)

    @property
    def variance(self) -> float:
        inverse = 1 / self.exponent
        return self.scale ** (-2 * inverse) * (
            math.gamma(1 + 2 * inverse) - math.gamma(1 + inverse) ** 2
        )

    @property
    def tail_class(self) -> TailClass:
        return TailClass.semi_exponential

    def sample(self, generator: np.random.Generator, size: int) -> np.ndarray:
        return (generator.standard_exponential(size=size) / self.scale) ** (
            1 / self.exponent
        )


class SqrtExpStep(StepDistribution):
    """
    The law with Λ(-s) = exp(-sqrt(s))(1 + sqrt(s)), s >= 0. Only its
    Laplace side is available; its tail is known asymptotically,
    P{ξ > t} ~ t^{-3/2} / (6 sqrt(π)).
    """

    family: Literal["sqrt-exp"] = "sqrt-exp"

    tail_constant: ClassVar[float] = 1 / (6 * math.sqrt(math.pi))

    def cdf(self, x: ArrayLike) -> ArrayLike:
        raise UnavailableError("the sqrt-exp step law has no closed-form cdf")

    def sf(self, x: ArrayLike) -> ArrayLike:
        raise UnavailableError("the sqrt-exp step law has no closed-form tail")

    def tail(self, t: float) -> TailValue:
        if not t > 0:
            raise DomainError(f"tail requires t > 0, got {t}")
        return TailValue(value=self.tail_constant * t ** (-1.5), asymptotic=True)

    @property
    def has_cdf(self) -> bool:
        return False

    @staticmethod
    def _root(s: float) -> float:
        if s > 0:
            raise DomainError(
                f"the sqrt-exp Laplace transform is only defined for s <= 0, got {s}"
            )
        return math.sqrt(-s)

    def laplace(self, s: float) -> float:
        r = self._root(s)
        return math.exp(-r) * (1 + r)

    def log_laplace(self, s: float) -> float:
        r = self._root(s)
        return -r + math.log1p(r)

    def cumulant_slope(self, s: float) -> float:
        return 1 / (2 * (1 + self._root(s)))

    @property
    def mean(self) -> float:
        return 0.5

    @property
    def variance(self) -> float:
        return math.inf

    @property
    def tail_class(self) -> TailClass:
        return TailClass.regular_finite_mean

    @property
    def regular_variation_index(self) -> Optional[float]:
        return 1.5

    @property
    def samplable(self) -> bool:
        return False

    def sample(self, generator: np.random.Generator, size: int) -> np.ndarray:
        raise UnavailableError("the sqrt-exp step law is not samplable")

    def sample_partial_sum(
        self, generator: np.random.Generator, n: int, size: int
    ) -> np.ndarray:
        raise UnavailableError("the sqrt-exp step law is not samplable")


STEP_FAMILIES: Dict[str, Type[StepDistribution]] = {
    cls.__fields__["family"].default: cls
    for cls in (GammaStep, ParetoStep, WeibullTypeStep, SqrtExpStep)
}


def step_from_config(config: Mapping[str, Any]) -> StepDistribution:
    """
    Builds a step law from {"family": ..., "parameters": {...}}.
    Unknown families, unknown keys and invalid parameters are errors.
    """
    if isinstance(config, StepDistribution):
        return config
    unknown = set(config) - {"family", "parameters"}
    if unknown:
        raise DomainError(f"unknown step keys: {sorted(unknown)}")
    family = config.get("family")
    if family not in STEP_FAMILIES:
        raise DomainError(
            f"unknown step family {family!r}; expected one of {sorted(STEP_FAMILIES)}"
        )
    parameters = dict(config.get("parameters") or {})
    return STEP_FAMILIES[family](**parameters)
