"""
Rate functions of the decoupled count and the closed-form rates it is
compared against.

    f_α(s) = ∫_0^∞ log((e^s - 1) P{Z_α > y} + 1) dy
    J_α(b) = sup_s (b s - f_α(s))
    I(x)   = sup_{s >= 0} (s x - log Λ(s)),   x >= μ
    I*(x)  = sup_{s <= 0} (s x - log Λ(s)),   x <= μ

Both suprema are attained where the slope of the convex function equals
the level, so every rate is a monotone root-finding problem followed by
one evaluation.
"""
import math
from typing import Callable, List

from injector import inject, singleton

from decoupled_renewal.app_config import ApplicationConfig
from decoupled_renewal.errors import BracketError, DomainError, HypothesisError
from decoupled_renewal.models.rates import LegendreSolution
from decoupled_renewal.models.steps import StepDistribution
from decoupled_renewal.services.solvers import NumericalSolver
from decoupled_renewal.services.survival import InverseStableSurvival
from decoupled_renewal.util import AppLoggerMixIn


def _tilted_survival(s: float, survival: float, cdf: float) -> float:
    """e^s P / ((e^s - 1) P + 1), rewritten so that neither branch overflows."""
    if s >= 0:
        return survival / (survival + math.exp(-s) * cdf)
    weighted = math.exp(s) * survival
    return weighted / (weighted + cdf)


@singleton
class RateFunctionService(AppLoggerMixIn):
    @inject
    def __init__(
        self,
        config: ApplicationConfig,
        solver: NumericalSolver,
        survival: InverseStableSurvival,
    ):
        self.quadrature_settings = config.quadrature_settings
        self.root_settings = config.root_finding_settings
        self.solver = solver
        self.survival = survival

    # f_α and its derivatives

    def _integrate_over_support(self, alpha: float, s: float, integrand: Callable) -> float:
        threshold = self.quadrature_settings.tail_tol / max(1.0, math.exp(min(s, 700.0)))
        end = self.survival.support_end(alpha, threshold)
        # For s < 0 the integrand changes scale where the cdf crosses e^s.
        points = [math.exp(s)] if s < 0 else None
        return self.solver.integrate(integrand, 0.0, end, points=points).value

    def f_alpha(self, alpha: float, s: float) -> float:
        if s == 0:
            return 0.0
        growth = math.expm1(s)

        def integrand(y: float) -> float:
            survival = self.survival.survival(alpha, y)
            if s > 0 or survival < 0.5:
                return math.log1p(growth * survival)
            # 1 + (e^s - 1) P with P near 1: go through the cdf.
            return math.log(math.exp(s) * survival + self.survival.cdf(alpha, y))

        return self._integrate_over_support(alpha, s, integrand)

    def f_alpha_prime(self, alpha: float, s: float) -> float:
        def integrand(y: float) -> float:
            return _tilted_survival(
                s, self.survival.survival(alpha, y), self.survival.cdf(alpha, y)
            )

        return self._integrate_over_support(alpha, s, integrand)

    def f_alpha_second(self, alpha: float, s: float) -> float:
        def integrand(y: float) -> float:
            tilted = _tilted_survival(
                s, self.survival.survival(alpha, y), self.survival.cdf(alpha, y)
            )
            return tilted * (1 - tilted)

        return self._integrate_over_support(alpha, s, integrand)

    def conjugate_J(self, alpha: float, b: float) -> LegendreSolution:
        """J_α(b) with the point s_b where f_α′(s_b) = b."""
        if not b > 0:
            raise DomainError(f"conjugate_J requires b > 0, got {b}")
        if b == 1:
            return LegendreSolution(
                b=b, s_b=0.0, rate=0.0, f_at_s=0.0, second_deriv=self.f_alpha_second(alpha, 0.0)
            )

        def excess(s: float) -> float:
            return self.f_alpha_prime(alpha, s) - b

        try:
            lower, upper = self.solver.expand_bracket(excess, 0.0, 1 if b > 1 else -1)
        except BracketError as e:
            low, high = sorted(value + b for value in e.achieved_range)
            raise BracketError(target=b, achieved_range=(low, high)) from e
        s_b = self.solver.safeguarded_newton(
            excess, lambda s: self.f_alpha_second(alpha, s), lower, upper
        )
        f_at_s = self.f_alpha(alpha, s_b)
        solution = LegendreSolution(
            b=b,
            s_b=s_b,
            rate=max(0.0, b * s_b - f_at_s),
            f_at_s=f_at_s,
            second_deriv=self.f_alpha_second(alpha, s_b),
        )
        self.logger.debug(f"J_{alpha:g}({b:g}) = {solution.rate:.12g} at s_b = {s_b:.12g}")
        return solution

    def rate_rows(self, alpha: float, b_grid: List[float]) -> List[LegendreSolution]:
        return [self.conjugate_J(alpha, b) for b in b_grid]

    # Cramér rates of the step law

    def cramer_rate_I(self, step: StepDistribution, x: float) -> float:
        analysis = step.light_tail_analysis()
        mean = step.mean
        if not analysis.moment_bound > 0:
            raise DomainError(f"I(x) needs exponential moments; {step.describe()} has B = 0")
        if not mean <= x < analysis.slope_limit:
            raise DomainError(
                f"I(x) is defined for {mean:g} <= x < {analysis.slope_limit:g}, got {x}"
            )
        if x == mean:
            return 0.0
        s = self.solver.brent(
            lambda s: step.cumulant_slope(s) - x, 0.0, self._upper_bracket(step, x)
        )
        return max(0.0, s * x - step.log_laplace(s))

    def _upper_bracket(self, step: StepDistribution, x: float) -> float:
        """A point s in (0, B) with m(s) > x."""
        bound = step.light_tail_analysis().moment_bound
        if math.isinf(bound):
            s = 1.0
            while step.cumulant_slope(s) <= x:
                s *= 2
                if s > self.root_settings.bracket_limit:
                    raise BracketError(target=x, achieved_range=(step.mean, step.cumulant_slope(s / 2)))
            return s
        gap = bound / 2
        while step.cumulant_slope(bound - gap) <= x:
            gap /= 2
            if gap < bound * 1e-15:
                raise BracketError(target=x, achieved_range=(step.mean, step.cumulant_slope(bound - 2 * gap)))
        return bound - gap

    def cramer_rate_I_star(self, step: StepDistribution, x: float) -> float:
        mean = step.mean
        if not 0 < x <= mean:
            raise DomainError(f"I*(x) is defined for 0 < x <= {mean:g}, got {x}")
        if not step.has_mass_below(x):
            raise DomainError(f"I*(x) needs P{{ξ <= {x:g}}} > 0 for {step.describe()}")
        if x == mean:
            return 0.0

        def excess(s: float) -> float:
            return step.cumulant_slope(s) - x

        lower, upper = self.solver.expand_bracket(excess, 0.0, -1)
        s = self.solver.brent(excess, lower, upper)
        return max(0.0, s * x - step.log_laplace(s))

    def deviation_integral(self, step: StepDistribution, b: float) -> float:
        """
        The t² coefficient of -log P{N(t) = ⌊bt/μ⌋} for light steps:
            b < 1:  ∫_{b/μ}^{1/μ} y I(1/y) dy
            b > 1:  ∫_{1/μ}^{b/μ} y I*(1/y) dy
        """
        if not b > 0 or b == 1:
            raise DomainError(f"deviation_integral requires b > 0 and b != 1, got {b}")
        mean = step.mean
        if not 0 < mean < math.inf:
            raise HypothesisError("0 < mu < inf", f"mu = {mean:g}")
        if b < 1:
            analysis = step.light_tail_analysis()
            if not analysis.moment_bound > 0:
                raise HypothesisError("B > 0", f"{step.describe()} has no exponential moments")
            if not mean / b < analysis.slope_limit:
                raise HypothesisError(
                    "mu/b < A_0", f"mu/b = {mean / b:g}, A_0 = {analysis.slope_limit:g}"
                )
            rate, lower, upper = self.cramer_rate_I, b / mean, 1 / mean
        else:
            if not step.has_mass_below(mean / b):
                raise HypothesisError("P{xi <= mu/b} > 0", f"mu/b = {mean / b:g}")
            rate, lower, upper = self.cramer_rate_I_star, 1 / mean, b / mean

        def integrand(y: float) -> float:
            level = 1 / y
            # Clamp roundoff at the endpoint 1/μ back onto the domain.
            level = min(level, mean) if b > 1 else max(level, mean)
            return y * rate(step, level)

        return self.solver.integrate(
            integrand, lower, upper, abs_tol=self.quadrature_settings.deviation_abs_tol
        ).value

    # Small-b heuristic limit and the variance constant

    def zero_count_limit(self, alpha: float) -> float:
        """∫_0^∞ -log P{Z_α <= y} dy; π²/6 for α = 0."""

        inverse_mean = 1.0 if alpha == 0 else 1 / (math.gamma(1 - alpha) * math.gamma(1 + alpha))

        def integrand(y: float) -> float:
            cdf = self.survival.cdf(alpha, y)
            if cdf <= 0:
                # Below table resolution P{Z_α <= y} is linear in y.
                cdf = inverse_mean * y
            return -math.log(cdf)

        end = self.survival.support_end(alpha)
        return self.solver.integrate(integrand, 0.0, end).value

    def variance_constant(self, alpha: float) -> float:
        """
        c_α = ∫ P{W^←(1) > y} P{W^←(1) <= y} dy, i.e. E[W^←(1)] times the
        same integral for Z_α. c_0 = 1/2.
        """
        mean = 1.0
        if alpha > 0:
            mean = 1 / (math.gamma(1 - alpha) * math.gamma(1 + alpha))

        def integrand(y: float) -> float:
            return self.survival.survival(alpha, y) * self.survival.cdf(alpha, y)

        end = self.survival.support_end(alpha)
        return mean * self.solver.integrate(
            integrand, 0.0, end, abs_tol=self.quadrature_settings.deviation_abs_tol
        ).value

    # Closed forms

    @staticmethod
    def heavy_rate_regular(alpha: float, b: float, mu: float) -> float:
        """lim -log P{N(t) = ⌊bt/μ⌋} / (t log t) for regularly varying tails, α > 1."""
        if not alpha > 1 or not 0 < b < 1 or not mu > 0:
            raise DomainError(f"heavy_rate_regular needs α > 1, b in (0, 1), μ > 0; got {(alpha, b, mu)}")
        return (alpha - 1) * (1 - b) / mu

    @staticmethod
    def semiexp_rate(alpha: float, b: float, mu: float) -> float:
        """lim -log P{N(t) = ⌊bt/μ⌋} / (t H(t)) for H(t) = -log P{ξ > t} ~ c t^α."""
        if not 0 < alpha < 1 or not 0 <= b < 1 or not mu > 0:
            raise DomainError(f"semiexp_rate needs α in (0, 1), b in [0, 1), μ > 0; got {(alpha, b, mu)}")
        return (1 - b) ** (alpha + 1) / (mu * (alpha + 1))

    @staticmethod
    def second_order_coeff(b: float, mu: float) -> float:
        """Coefficient of t log t in the light-tailed expansion."""
        if not b > 0 or b == 1 or not mu > 0:
            raise DomainError(f"second_order_coeff needs b > 0, b != 1, μ > 0; got {(b, mu)}")
        return abs(b - 1) / (2 * mu)

    @staticmethod
    def ginibre_prediction(rho: float, b: float, t: float) -> float:
        """
        Two-term prediction of -log P{Θ_ρ(D_t) = ⌊b t^ρ ρ/2⌋} for the
        ρ-Mittag-Leffler ensemble (ρ = 2 is Ginibre).
        """
        if not rho > 0 or not b > 0 or b == 1 or not t > 1:
            raise DomainError(f"ginibre_prediction needs ρ > 0, b > 0, b != 1, t > 1; got {(rho, b, t)}")
        leading = (rho / 8) * abs(2 * b**2 * math.log(b) - (b - 1) * (3 * b - 1))
        return leading * t ** (2 * rho) + abs(b - 1) * rho**2 / 4 * t**rho * math.log(t)

    # Renewal-theoretic predictions

    @staticmethod
    def renewal_asymptotic(step: StepDistribution, t: float) -> float:
        """
        Leading term of U(t): t/μ for a finite mean, and
        1 / (Γ(1-α) Γ(1+α) P{ξ > t}) for a tail of index α in (0, 1).
        """
        mean = step.mean
        if math.isfinite(mean):
            return t / mean
        index = step.regular_variation_index
        if index is None or not 0 < index < 1:
            raise HypothesisError("regularly varying tail with index in (0, 1)", step.describe())
        return 1 / (math.gamma(1 - index) * math.gamma(1 + index) * step.tail(t).value)

    def variance_asymptotic(self, step: StepDistribution, t: float) -> float:
        """
        Leading term of Var N(t) = Σ p_n (1 - p_n): (σ² t / (μ³ π))^{1/2}
        for a finite variance, c_α / P{ξ > t} for a tail of index α in (0, 1).
        """
        if math.isfinite(step.variance):
            return math.sqrt(step.variance * t / (step.mean**3 * math.pi))
        index = step.regular_variation_index
        if math.isinf(step.mean) and index is not None and 0 < index < 1:
            return self.variance_constant(index) / step.tail(t).value
        raise HypothesisError(
            "finite variance, or a regularly varying tail with index in (0, 1)", step.describe()
        )
