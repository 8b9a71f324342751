"""
The special-function kernel: Mittag-Leffler series, the one-sided stable
distribution function, the normalized inverse-stable survival function,
incomplete gamma, normal tail and the dilogarithm.

Stable laws
-----------
W(1) with Laplace exponent Γ(1-α)z^α is a rescaled copy of the standard
positive stable S with exponent z^α:  W(1) = Γ(1-α)^{1/α} S. For S we use
Kanter's single-integral form on the bounded interval [0, π]:

    P{S <= x} = (1/π) ∫_0^π exp(-x^{-α/(1-α)} A(φ)) dφ,
    A(φ) = sin(αφ)^{α/(1-α)} sin((1-α)φ) / sin(φ)^{1/(1-α)}.

For α = 1/2 this gives P{W(1) <= x} = erfc(sqrt(π/(4x))).

Inverse stable
--------------
{W^←(1) > u} = {W(u) <= 1}, and W(u) has the law of u^{1/α} W(1), so
P{W^←(1) > u} = P{W(1) <= u^{-1/α}}. Z_α is W^←(1) divided by its mean
m = 1/(Γ(1-α)Γ(1+α)), hence P{Z_α > y} = P{W(1) <= (m y)^{-1/α}}.
For α = 1/2 this is erfc(y/sqrt(π)).
"""
from __future__ import annotations

import math
from typing import Union

import mpmath
import numpy as np
from injector import inject, singleton
from scipy import integrate, special

from decoupled_renewal.app_config import ApplicationConfig
from decoupled_renewal.errors import DomainError, RangeError
from decoupled_renewal.models.special import MittagLefflerParams, StableSubordinatorLaw
from decoupled_renewal.util import AppLoggerMixIn

ArrayLike = Union[float, np.ndarray]


def _kanter_log_a(alpha: float, phi: np.ndarray) -> np.ndarray:
    return (
        (alpha / (1 - alpha)) * np.log(np.sin(alpha * phi))
        + np.log(np.sin((1 - alpha) * phi))
        - (1 / (1 - alpha)) * np.log(np.sin(phi))
    )


def _kanter_integrand(alpha: float, log_scale: np.ndarray, phi: float) -> np.ndarray:
    # exp(-x^{-α/(1-α)} A(φ)) evaluated through logs; A blows up as φ -> π.
    with np.errstate(over="ignore", divide="ignore"):
        return np.exp(-np.exp(log_scale + _kanter_log_a(alpha, phi)))


@singleton
class SpecialFunctionService(AppLoggerMixIn):
    # Series terms beyond this magnitude (in log scale) are not attempted.
    max_log_term = 2000.0
    max_abs_argument = 50.0
    # Terms this far (in log scale) below the running scale are dropped.
    series_cutoff = 120.0

    stable_abs_tol = 1e-14
    stable_rel_tol = 1e-10

    @inject
    def __init__(self, config: ApplicationConfig):
        self.quadrature_settings = config.quadrature_settings

    def mittag_leffler(self, params: MittagLefflerParams, z: float) -> float:
        """
        E_{a,b}(z) = Σ z^k / Γ(ak+b) by direct summation. Nonnegative
        arguments are summed with math.fsum; negative ones in mpmath at a
        working precision that covers the cancellation between the
        largest term and the result.
        """
        a, b = params.a, params.b
        if not math.isfinite(z):
            raise DomainError(f"Mittag-Leffler argument must be finite, got {z}")
        if abs(z) > self.max_abs_argument:
            raise RangeError(
                f"|z|={abs(z):g} exceeds the supported range |z| <= {self.max_abs_argument:g}"
            )
        if z == 0:
            return float(special.rgamma(b))

        log_abs_z = math.log(abs(z))
        peak_index = self._peak_term_index(a, b, log_abs_z)
        if math.isinf(peak_index):
            raise RangeError(f"E_{{{a:g},{b:g}}}({z:g}) peaks beyond any summable index")
        peak_log = peak_index * log_abs_z - special.gammaln(a * peak_index + b)
        if peak_log > self.max_log_term or (z > 0 and peak_log > 700):
            raise RangeError(
                f"E_{{{a:g},{b:g}}}({z:g}) has series terms of size e^{peak_log:.0f}"
            )

        if z > 0:
            return self._positive_series(a, b, log_abs_z, peak_index)
        return self._alternating_series(a, b, z, peak_index, peak_log)

    @staticmethod
    def _peak_term_index(a: float, b: float, log_abs_z: float) -> float:
        # d/dk [k log|z| - log Γ(ak+b)] = 0  <=>  a ψ(ak+b) = log|z|, ψ ≈ log
        exponent = log_abs_z / a
        if exponent > 700:
            return math.inf
        return max(0.0, (math.exp(exponent) - b) / a)

    def _positive_series(
        self, a: float, b: float, log_z: float, peak_index: float
    ) -> float:
        terms = []
        running_max = -math.inf
        k = 0
        while True:
            log_term = k * log_z - special.gammaln(a * k + b)
            running_max = max(running_max, log_term)
            terms.append(log_term)
            if k > peak_index and log_term < running_max - self.series_cutoff / 3:
                break
            k += 1
        return math.fsum(math.exp(t) for t in terms)

    def _alternating_series(
        self, a: float, b: float, z: float, peak_index: float, peak_log: float
    ) -> float:
        digits = int(max(0.0, peak_log) / math.log(10)) + 40
        with mpmath.workdps(digits):
            z_mp = mpmath.mpf(z)
            total = mpmath.mpf(0)
            k = 0
            while True:
                term = z_mp**k * mpmath.rgamma(a * k + b)
                total += term
                if k > peak_index and (
                    term == 0 or mpmath.log(abs(term)) < -self.series_cutoff
                ):
                    break
                k += 1
            return float(total)

    def stable_cdf(self, law: StableSubordinatorLaw, x: float) -> float:
        """P{W(1) <= x} for the subordinator with Laplace exponent Γ(1-α)z^α."""
        if not x > 0:
            raise DomainError(f"stable_cdf requires x > 0, got {x}")
        return self._standard_stable_cdf(law.alpha, x / law.kanter_scale)

    def _standard_stable_cdf(self, alpha: float, x: float) -> float:
        if math.isinf(x):
            return 1.0
        log_scale = -(alpha / (1 - alpha)) * math.log(x)

        def integrand(phi: float) -> float:
            return float(_kanter_integrand(alpha, log_scale, phi))

        value, _ = integrate.quad(
            integrand,
            0.0,
            math.pi,
            epsabs=self.stable_abs_tol,
            epsrel=self.stable_rel_tol,
            limit=self.quadrature_settings.subdivision_limit,
        )
        return min(1.0, max(0.0, value / math.pi))

    def standard_stable_cdf_block(self, alpha: float, x: np.ndarray) -> np.ndarray:
        """
        Vectorized P{S <= x} for the standard law over a block of points.
        The tolerance is relative to the largest value in the block, so
        blocks should cover values of similar magnitude.
        """
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            log_scale = -(alpha / (1 - alpha)) * np.log(x)

        def integrand(phi: float) -> np.ndarray:
            return _kanter_integrand(alpha, log_scale, phi)

        value, _ = integrate.quad_vec(
            integrand,
            0.0,
            math.pi,
            epsabs=0.0,
            epsrel=self.stable_rel_tol / 10,
            norm="max",
            limit=self.quadrature_settings.subdivision_limit,
        )
        return np.clip(value / math.pi, 0.0, 1.0)

    def inverse_stable_survival(self, alpha: float, y: float) -> float:
        """P{Z_α > y} computed directly through stable_cdf (no tabulation)."""
        law = self._law(alpha)
        if y < 0:
            raise DomainError(f"inverse_stable_survival requires y >= 0, got {y}")
        if y == 0:
            return 1.0
        return self.stable_cdf(law, (law.inverse_mean * y) ** (-1 / alpha))

    @staticmethod
    def _law(alpha: float) -> StableSubordinatorLaw:
        if not 0 < alpha < 1:
            raise DomainError(
                f"stability index must lie in (0, 1), got {alpha}; "
                f"the exponential case α=0 is handled by the caller"
            )
        return StableSubordinatorLaw(alpha=alpha)

    @staticmethod
    def regularized_gamma_p(shape: float, x: ArrayLike) -> ArrayLike:
        """P(shape, x) = γ(shape, x)/Γ(shape)."""
        if not shape > 0:
            raise DomainError(f"shape must be positive, got {shape}")
        if np.any(np.asarray(x) < 0):
            raise DomainError("regularized_gamma_p requires x >= 0")
        return special.gammainc(shape, x)

    @staticmethod
    def regularized_gamma_q(shape: float, x: ArrayLike) -> ArrayLike:
        """Q(shape, x) = 1 - P(shape, x), computed without cancellation."""
        if not shape > 0:
            raise DomainError(f"shape must be positive, got {shape}")
        if np.any(np.asarray(x) < 0):
            raise DomainError("regularized_gamma_q requires x >= 0")
        return special.gammaincc(shape, x)

    @staticmethod
    def normal_cdf(x: ArrayLike) -> ArrayLike:
        return special.ndtr(x)

    @staticmethod
    def erfc(x: ArrayLike) -> ArrayLike:
        return special.erfc(x)

    @staticmethod
    def dilog(x: float) -> float:
        """Li₂(x) for x <= 1. scipy's spence(z) is Li₂(1 - z)."""
        if x > 1:
            raise DomainError(f"dilog is only real for x <= 1, got {x}")
        return float(special.spence(1 - x))
