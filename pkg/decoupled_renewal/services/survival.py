from __future__ import annotations

import math
import threading
from typing import Dict, Optional

import numpy as np
from injector import inject, singleton
from scipy.interpolate import CubicSpline

from decoupled_renewal.app_config import ApplicationConfig
from decoupled_renewal.errors import DomainError
from decoupled_renewal.models.special import StableSubordinatorLaw
from decoupled_renewal.services.solvers import NumericalSolver
from decoupled_renewal.services.special import SpecialFunctionService
from decoupled_renewal.util import AppLoggerMixIn, Timer
from decoupled_renewal.workers import raise_if_cancelled


class SurvivalTable:
    """
    log P{Z_α > y} sampled on [0, end] and interpolated by a cubic spline.
    Read-only once built.
    """

    def __init__(self, alpha: float, grid: np.ndarray, log_survival: np.ndarray):
        self.alpha = alpha
        self.end = float(grid[-1])
        self._spline = CubicSpline(grid, log_survival)

    def log_value(self, y: float) -> float:
        return min(0.0, float(self._spline(y)))

    def __call__(self, y: float) -> float:
        return math.exp(self.log_value(y))


@singleton
class InverseStableSurvival(AppLoggerMixIn):
    """
    P{Z_α > y} for α in [0, 1), where Z_0 is the unit exponential and,
    for α > 0, Z_α is the inverse stable subordinator at time 1 divided
    by its mean.

    With SURVIVAL_TABLE_MEMOIZE the values on [0, end_α] come from a
    per-α table of log-survival values; beyond end_α (where the survival
    is below `table_floor`) they are computed directly.
    """

    table_floor = 1e-30
    block_size = 64
    bisection_steps = 30

    @inject
    def __init__(
        self,
        config: ApplicationConfig,
        special: SpecialFunctionService,
        solver: NumericalSolver,
    ):
        self.settings = config.survival_table_settings
        self.quadrature_settings = config.quadrature_settings
        self.special = special
        self.solver = solver
        self._tables: Dict[float, SurvivalTable] = {}
        self._lock = threading.Lock()

    def survival(self, alpha: float, y: float) -> float:
        self._check_alpha(alpha)
        if y < 0:
            raise DomainError(f"survival requires y >= 0, got {y}")
        if alpha == 0:
            return math.exp(-y)
        if self.settings.memoize:
            table = self.table(alpha)
            if y <= table.end:
                return table(y)
        return self.special.inverse_stable_survival(alpha, y)

    def cdf(self, alpha: float, y: float) -> float:
        """P{Z_α <= y}; from the log table where it applies, so small values keep their digits."""
        self._check_alpha(alpha)
        if y < 0:
            raise DomainError(f"cdf requires y >= 0, got {y}")
        if alpha == 0:
            return -math.expm1(-y)
        if self.settings.memoize:
            table = self.table(alpha)
            if y <= table.end:
                return -math.expm1(table.log_value(y))
        return 1.0 - self.special.inverse_stable_survival(alpha, y)

    def table(self, alpha: float) -> SurvivalTable:
        table = self._tables.get(alpha)
        if table is None:
            with self._lock:
                table = self._tables.get(alpha)
                if table is None:
                    table = self._build_table(alpha)
                    self._tables[alpha] = table
        return table

    def _build_table(self, alpha: float) -> SurvivalTable:
        end = self._direct_support_end(alpha, self.table_floor)
        grid = np.linspace(0.0, end, self.settings.size)
        law = StableSubordinatorLaw(alpha=alpha)
        with Timer(f"survival-table[alpha={alpha:g}]"):
            with np.errstate(divide="ignore"):
                arguments = (law.inverse_mean * grid) ** (-1 / alpha) / law.kanter_scale
            values = np.empty_like(grid)
            for start in range(0, grid.size, self.block_size):
                block = slice(start, start + self.block_size)
                raise_if_cancelled()
                values[block] = self.special.standard_stable_cdf_block(
                    alpha, arguments[block]
                )
        values[0] = 1.0
        log_values = np.log(np.clip(values, np.finfo(float).tiny, 1.0))
        self.logger.info(
            f"built inverse-stable survival table for alpha={alpha:g} on [0, {end:.4g}]"
        )
        return SurvivalTable(alpha, grid, log_values)

    def _direct_support_end(self, alpha: float, threshold: float) -> float:
        """Smallest y (up to bisection accuracy) with P{Z_α > y} <= threshold."""
        lower, upper = 0.0, 1.0
        while self.special.inverse_stable_survival(alpha, upper) > threshold:
            lower, upper = upper, 2 * upper
        for _ in range(self.bisection_steps):
            middle = 0.5 * (lower + upper)
            if self.special.inverse_stable_survival(alpha, middle) > threshold:
                lower = middle
            else:
                upper = middle
        return upper

    def support_end(
        self, alpha: float, threshold: Optional[float] = None, growth_rate: float = 0.0
    ) -> float:
        """
        A point Y with exp(growth_rate * Y) * P{Z_α > Y} below `threshold`
        (default QUADRATURE_TAIL_TOL), found by doubling. Integrals against
        the survival function are truncated at Y.
        """
        threshold = threshold or self.quadrature_settings.tail_tol
        self._check_alpha(alpha)
        if alpha == 0 and growth_rate < 1:
            return max(1.0, -math.log(threshold) / (1 - growth_rate))
        y = 1.0
        while math.exp(min(700.0, growth_rate * y)) * self.survival(alpha, y) > threshold:
            y *= 2
            if y > 1e6:
                raise DomainError(
                    f"survival of Z_{alpha:g} does not fall below {threshold:g} "
                    f"against growth rate {growth_rate:g}"
                )
        return y

    def mean(self, alpha: float) -> float:
        """∫ P{Z_α > y} dy; equals 1 up to quadrature accuracy."""
        end = self.support_end(alpha)
        return self.solver.integrate(
            lambda y: self.survival(alpha, y),
            0.0,
            end,
            abs_tol=self.quadrature_settings.deviation_abs_tol,
        ).value

    @staticmethod
    def _check_alpha(alpha: float):
        if not 0 <= alpha < 1:
            raise DomainError(f"alpha must lie in [0, 1), got {alpha}")

    def mgf(self, alpha: float, s: float) -> float:
        """
        E[exp(s Z_α / Γ(1+α))] = 1 + (s/Γ(1+α)) ∫ exp(s y/Γ(1+α)) P{Z_α > y} dy.

        This is E[exp(s Γ(1-α) W^←(1))], which equals the Mittag-Leffler
        function E_{α,1}(s).
        """
        rate = s / math.gamma(1 + alpha)
        if rate == 0:
            return 1.0
        end = self.support_end(alpha, growth_rate=max(rate, 0.0))
        integral = self.solver.integrate(
            lambda y: math.exp(rate * y) * self.survival(alpha, y),
            0.0,
            end,
            abs_tol=self.quadrature_settings.deviation_abs_tol,
        )
        return 1.0 + rate * integral.value
