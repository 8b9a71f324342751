"""
Walk marginals p_n(t) = P{S_n <= t}, the renewal mean U(t) = Σ p_n and
the decoupled variance Σ p_n (1 - p_n).

Gamma steps close under convolution, so their marginals are regularized
incomplete gamma values. Every other law with a cdf goes through the
lattice engine, which pushes each cell's mass to the right (lower
enclosure) and to the left (upper enclosure) of the cell and convolves
both lattices n times.
"""
import math
from typing import Optional, Tuple

import numpy as np
from injector import inject, singleton
from scipy import signal, special

from decoupled_renewal.app_config import ApplicationConfig
from decoupled_renewal.errors import (
    DomainError,
    LatticeTooCoarseError,
    RangeError,
    UnavailableError,
)
from decoupled_renewal.models.enum import MarginalsMethod
from decoupled_renewal.models.marginals import CertifiedValue, WalkMarginals
from decoupled_renewal.models.steps import GammaStep, StepDistribution
from decoupled_renewal.util import AppLoggerMixIn, Timer, exact_sum
from decoupled_renewal.workers import raise_if_cancelled


def gamma_tail_log_bound(shape: float, t: float, n: int) -> float:
    """
    log of a Chernoff bound on Σ_{j>n} P{Gamma(j·shape, 1) <= t}:

        P{S_j <= t} <= exp(θt) (1+θ)^{-j·shape},   θ > 0,

    summed as a geometric series and evaluated at the θ that is optimal
    for the first term, θ = (n+1)·shape/t - 1. Only meaningful once
    (n+1)·shape > t.
    """
    first = (n + 1) * shape
    theta = first / t - 1
    if theta <= 0:
        return math.inf
    log_ratio = shape * math.log1p(theta)
    return theta * t - first * math.log1p(theta) - math.log(-math.expm1(-log_ratio))


@singleton
class ConvolutionEngine(AppLoggerMixIn):
    @inject
    def __init__(self, config: ApplicationConfig):
        self.settings = config.convolution_settings

    def marginals(
        self,
        step: StepDistribution,
        t: float,
        eps_mass: Optional[float] = None,
        n_min: int = 0,
        cells_log2: Optional[int] = None,
    ) -> WalkMarginals:
        """Exact gamma marginals where available, lattice enclosures otherwise."""
        if isinstance(step, GammaStep):
            return self.marginals_exact_gamma(step.shape, t, eps_mass, n_min=n_min)
        h = None
        if cells_log2 is not None:
            h = t / 2**cells_log2
        return self.marginals_lattice(step, t, h=h, eps_mass=eps_mass, n_min=n_min)

    def marginals_exact_gamma(
        self,
        shape: float,
        t: float,
        eps_mass: Optional[float] = None,
        n_min: int = 0,
    ) -> WalkMarginals:
        if not shape > 0 or not t > 0:
            raise DomainError(f"exact gamma marginals need shape > 0 and t > 0, got ({shape}, {t})")
        eps_mass = eps_mass or self.settings.exact_eps_mass
        n_terms = self._gamma_truncation(shape, t, eps_mass, n_min)
        index = np.arange(1, n_terms + 1)
        probs = special.gammainc(index * shape, t)
        complements = special.gammaincc(index * shape, t)
        tail_bound = math.exp(gamma_tail_log_bound(shape, t, n_terms))
        self.logger.debug(
            f"gamma({shape:g}) marginals at t={t:g}: N={n_terms}, tail <= {tail_bound:.2e}"
        )
        return WalkMarginals(
            t=t,
            probs=np.minimum.accumulate(probs),
            complements=np.maximum.accumulate(complements),
            tail_bound=tail_bound,
            eps_mass=eps_mass,
            method=MarginalsMethod.exact_gamma,
        )

    def _gamma_truncation(self, shape: float, t: float, eps_mass: float, n_min: int) -> int:
        """Smallest N >= max(t/shape + 1, n_min, 1) whose tail bound is below eps_mass."""
        log_eps = math.log(eps_mass)
        lower = max(math.ceil(t / shape) + 1, n_min, 1)

        def small_enough(n: int) -> bool:
            return gamma_tail_log_bound(shape, t, n) < log_eps

        upper = lower
        while not small_enough(upper):
            lower = upper + 1
            upper = 2 * upper
            if upper > self.settings.max_terms:
                raise RangeError(
                    f"gamma({shape:g}) marginals at t={t:g} need more than "
                    f"{self.settings.max_terms} terms"
                )
        while lower < upper:
            middle = (lower + upper) // 2
            if small_enough(middle):
                upper = middle
            else:
                lower = middle + 1
        return upper

    def marginals_lattice(
        self,
        step: StepDistribution,
        t: float,
        h: Optional[float] = None,
        eps_mass: Optional[float] = None,
        n_min: int = 0,
    ) -> WalkMarginals:
        """
        Enclosures p_n^- <= p_n(t) <= p_n^+ from the two rounded lattices,
        returned as their midpoint with the enclosure width alongside.

        Complements P{S_n > t} are accumulated directly from the step's
        survival function: the mass of S_{n-1} below t that one more step
        carries past t. They never go through 1 - p_n. Each complement bound
        is exact for its own rounded walk, which starts from the rounded first
        step, so [lower, upper] encloses P{S_n > t} up to FFT roundoff.
        """
        if not step.has_cdf:
            raise UnavailableError(f"{step.describe()} has no cdf for the lattice engine")
        if not t > 0:
            raise DomainError(f"lattice marginals need t > 0, got {t}")
        h = h or t / 2**self.settings.lattice_cells_log2
        if not h > 0:
            raise DomainError(f"lattice width must be positive, got {h}")
        eps_mass = eps_mass or self.settings.lattice_eps_mass
        last = int(math.floor(t / h))
        points = h * np.arange(last + 2)

        cdf = np.asarray(step.cdf(points), dtype=float)
        # Mass of ((i-1)h, ih] placed at ih, and mass of [ih, (i+1)h) placed at ih.
        right_masses = np.diff(cdf, prepend=0.0)[: last + 1]
        left_masses = np.diff(cdf)
        # P{one rounded step leaves [0, t] from lattice point i}
        right_escape = np.asarray(step.sf(points[last::-1]), dtype=float)
        left_escape = np.asarray(step.sf(points[last + 1 : 0 : -1]), dtype=float)

        lower_mass, upper_mass = right_masses, left_masses
        probs = [(float(step.cdf(t)), float(step.cdf(t)))]
        # P{rounded-down step > t} and P{rounded-up step > t}
        complements = [(float(step.sf(points[last + 1])), float(step.sf(points[last])))]
        tail_bound = math.inf

        with Timer(f"lattice-marginals[{step.describe()}, t={t:g}]", emit_log=False) as timer:
            while len(probs) < n_min or tail_bound >= eps_mass:
                raise_if_cancelled()
                n = len(probs) + 1
                if n > self.settings.max_terms:
                    raise RangeError(
                        f"lattice marginals at t={t:g} need more than {self.settings.max_terms} terms"
                    )
                lower_escape = complements[-1][0] + float(np.dot(upper_mass, left_escape))
                upper_escape = complements[-1][1] + float(np.dot(lower_mass, right_escape))
                lower_mass = self._convolve(lower_mass, right_masses, last)
                upper_mass = self._convolve(upper_mass, left_masses, last)
                lower_prob, upper_prob = self._enclose(
                    float(lower_mass.sum()), float(upper_mass.sum()), probs[-1]
                )
                width = upper_prob - lower_prob
                if width > self.settings.max_enclosure_width:
                    raise LatticeTooCoarseError(
                        n=n, width=width, bound=self.settings.max_enclosure_width
                    )
                probs.append((lower_prob, upper_prob))
                complements.append(
                    (
                        min(1.0, max(lower_escape, complements[-1][0])),
                        min(1.0, max(upper_escape, complements[-1][1])),
                    )
                )
                tail_bound = self._geometric_tail(probs[-2][1], upper_prob)

        bounds = np.array(probs)
        complement_bounds = np.array(complements)
        self.logger.debug(
            f"lattice marginals for {step.describe()} at t={t:g}: N={len(probs)}, "
            f"h={h:.3g}, tail <= {tail_bound:.2e} [{timer.result}s]"
        )
        return WalkMarginals(
            t=t,
            probs=np.minimum.accumulate(bounds.mean(axis=1)),
            complements=np.clip(complement_bounds.mean(axis=1), 0.0, 1.0),
            tail_bound=tail_bound,
            eps_mass=eps_mass,
            method=MarginalsMethod.lattice,
            enclosure_widths=bounds[:, 1] - bounds[:, 0],
        )

    @staticmethod
    def _convolve(masses: np.ndarray, kernel: np.ndarray, last: int) -> np.ndarray:
        # Only lattice points 0..last can still lie below t.
        return np.clip(signal.fftconvolve(masses, kernel)[: last + 1], 0.0, None)

    @staticmethod
    def _enclose(
        lower: float, upper: float, previous: Tuple[float, float]
    ) -> Tuple[float, float]:
        # p_n <= p_{n-1}, so the previous bounds cap both new ones.
        upper = min(upper, previous[1], 1.0)
        lower = min(max(lower, 0.0), previous[0], upper)
        return lower, upper

    def _geometric_tail(self, previous_upper: float, upper: float) -> float:
        """Σ_{j>n} p_j bounded by p_n^+ r/(1-r), r the inflated last ratio."""
        if upper == 0:
            return 0.0
        ratio = self.settings.ratio_inflation * upper / previous_upper
        if ratio >= 1:
            return math.inf
        return upper * ratio / (1 - ratio)

    @staticmethod
    def renewal_mean(marginals: WalkMarginals) -> CertifiedValue:
        return CertifiedValue(
            value=exact_sum(marginals.probs), error_bar=marginals.tail_bound
        )

    @staticmethod
    def renewal_variance(marginals: WalkMarginals) -> CertifiedValue:
        return CertifiedValue(
            value=exact_sum(marginals.probs * marginals.complements),
            error_bar=marginals.tail_bound,
        )
