import math

import pytest

from decoupled_renewal.errors import DomainError
from decoupled_renewal.models.special import MittagLefflerParams
from decoupled_renewal.services.special import SpecialFunctionService
from decoupled_renewal.services.survival import InverseStableSurvival


class TestInverseStableSurvival:
    @pytest.fixture(autouse=True)
    def initialize(self, injector):
        self.survival = injector.get(InverseStableSurvival)
        self.special = injector.get(SpecialFunctionService)

    @pytest.mark.parametrize("y", [0, 0.5, 2, 10])
    def test_exponential_case(self, y):
        assert self.survival.survival(0, y) == pytest.approx(math.exp(-y), rel=1e-15)
        assert self.survival.cdf(0, y) == pytest.approx(-math.expm1(-y), rel=1e-15)

    @pytest.mark.parametrize("y", [0.25, 1, 3])
    def test_table_matches_closed_form(self, y):
        expected = math.erfc(y / math.sqrt(math.pi))
        assert self.survival.survival(0.5, y) == pytest.approx(expected, rel=1e-7)
        assert self.survival.cdf(0.5, y) == pytest.approx(1 - expected, rel=1e-7)

    def test_cdf_keeps_small_values(self):
        y = 1e-4
        # erf(x) ≈ 2x/√π for small x
        assert self.survival.cdf(0.5, y) == pytest.approx(2 * y / math.pi, rel=1e-4)

    def test_beyond_table(self):
        end = self.survival.table(0.5).end
        y = end * 1.5
        assert self.survival.survival(0.5, y) == pytest.approx(
            self.special.inverse_stable_survival(0.5, y), rel=1e-9
        )

    @pytest.mark.parametrize("alpha", [0.3, 0.5, 0.7])
    def test_mean_is_one(self, alpha):
        assert self.survival.mean(alpha) == pytest.approx(1, abs=1e-8)

    @pytest.mark.parametrize("alpha, s", [(0.5, 1.0), (0.5, -2.0), (0.3, 0.5), (0, 0.5)])
    def test_mgf_is_mittag_leffler(self, alpha, s):
        expected = (
            1 / (1 - s)
            if alpha == 0
            else self.special.mittag_leffler(MittagLefflerParams(a=alpha, b=1), s)
        )
        assert self.survival.mgf(alpha, s) == pytest.approx(expected, rel=1e-7)

    def test_table_is_memoized(self):
        assert self.survival.table(0.5) is self.survival.table(0.5)

    @pytest.mark.parametrize(
        "alpha, y", [(1, 1.0), (-0.5, 1.0), (0.5, -1.0)]
    )
    def test_domain(self, alpha, y):
        with pytest.raises(DomainError):
            self.survival.survival(alpha, y)
        with pytest.raises(DomainError):
            self.survival.cdf(alpha, y)
