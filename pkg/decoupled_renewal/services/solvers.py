from __future__ import annotations

import math
from typing import Callable, Optional, Sequence, Tuple

from injector import inject, singleton
from scipy import integrate, optimize

from decoupled_renewal.app_config import ApplicationConfig
from decoupled_renewal.errors import BracketError, ConvergenceError
from decoupled_renewal.models.base import RenewalBaseModel
from decoupled_renewal.util import AppLoggerMixIn

ScalarFunction = Callable[[float], float]


class QuadratureResult(RenewalBaseModel):
    value: float
    abs_error: float
    subintervals: int


@singleton
class NumericalSolver(AppLoggerMixIn):
    """
    The adaptive quadrature and monotone root-finding used by every
    service. Tolerances come from the QUADRATURE_ and ROOT_ settings.
    """

    # quad's error estimate is pessimistic; only fail when it is far off.
    error_slack = 10.0

    @inject
    def __init__(self, config: ApplicationConfig):
        self.quadrature_settings = config.quadrature_settings
        self.root_settings = config.root_finding_settings

    def integrate(
        self,
        func: ScalarFunction,
        lower: float,
        upper: float,
        abs_tol: Optional[float] = None,
        rel_tol: float = 1e-12,
        points: Optional[Sequence[float]] = None,
    ) -> QuadratureResult:
        """
        Adaptive Gauss-Kronrod (QUADPACK) on [lower, upper]. Raises
        ConvergenceError carrying the achieved error when QUADPACK
        gives up noticeably short of the target.
        """
        abs_tol = abs_tol if abs_tol is not None else self.quadrature_settings.abs_tol
        limit = self.quadrature_settings.subdivision_limit
        if upper <= lower:
            return QuadratureResult(value=0.0, abs_error=0.0, subintervals=0)
        if points:
            points = [p for p in points if lower < p < upper] or None
        result = integrate.quad(
            func,
            lower,
            upper,
            epsabs=abs_tol,
            epsrel=rel_tol,
            limit=limit,
            points=points,
            full_output=1,
        )
        value, abs_error, info = result[0], result[1], result[2]
        if len(result) > 3:
            target = max(abs_tol, rel_tol * abs(value))
            if not math.isfinite(value) or abs_error > self.error_slack * target:
                raise ConvergenceError(
                    f"quadrature on [{lower:g}, {upper:g}] stopped early: {result[3]}",
                    achieved=abs_error,
                )
            self.logger.debug(
                f"quadrature on [{lower:g}, {upper:g}] flagged by QUADPACK "
                f"but within tolerance: {abs_error:.2e}"
            )
        return QuadratureResult(
            value=value, abs_error=abs_error, subintervals=info["last"]
        )

    def expand_bracket(
        self,
        func: ScalarFunction,
        start: float,
        direction: int,
        step: float = 1.0,
    ) -> Tuple[float, float]:
        """
        For an increasing `func` with a root on the `direction` side of
        `start`, grow a bracket geometrically until the sign changes.
        The bracket never leaves [-bracket_limit, bracket_limit].
        """
        limit = self.root_settings.bracket_limit
        inner = start
        value_at_start = func(start)
        while True:
            outer = start + direction * step
            if abs(outer) >= limit:
                outer = direction * limit
            value = func(outer)
            if (direction > 0 and value >= 0) or (direction < 0 and value <= 0):
                return (inner, outer) if direction > 0 else (outer, inner)
            if abs(outer) >= limit:
                raise BracketError(target=0.0, achieved_range=(value_at_start, value))
            inner = outer
            step *= 2

    def safeguarded_newton(
        self,
        func: ScalarFunction,
        derivative: ScalarFunction,
        lower: float,
        upper: float,
        initial: Optional[float] = None,
    ) -> float:
        """
        Root of an increasing `func` inside the bracket [lower, upper].
        Newton steps that leave the current bracket, or that are taken
        with a non-positive slope, fall back to bisection.
        """
        settings = self.root_settings
        x = initial if initial is not None else 0.5 * (lower + upper)
        if not lower <= x <= upper:
            x = 0.5 * (lower + upper)
        value = func(x)
        for _ in range(settings.max_iterations):
            if abs(value) <= settings.residual_tol:
                return x
            if value < 0:
                lower = x
            else:
                upper = x
            if upper - lower <= settings.xtol * max(1.0, abs(x)):
                return x
            slope = derivative(x)
            candidate = x - value / slope if slope > 0 else math.nan
            if not lower < candidate < upper:
                candidate = 0.5 * (lower + upper)
            x = candidate
            value = func(x)
        raise ConvergenceError(
            f"safeguarded Newton did not converge in {settings.max_iterations} iterations",
            achieved=abs(value),
        )

    def brent(self, func: ScalarFunction, lower: float, upper: float) -> float:
        """Plain Brent root in a verified bracket, for functions without a cheap derivative."""
        settings = self.root_settings
        try:
            return optimize.brentq(
                func,
                lower,
                upper,
                xtol=settings.xtol,
                maxiter=settings.max_iterations,
            )
        except RuntimeError as e:
            raise ConvergenceError(f"brentq failed on [{lower}, {upper}]: {e}")
