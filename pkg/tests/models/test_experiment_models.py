import math

import pytest
from pydantic import ValidationError

from decoupled_renewal.models.enum import StudyName
from decoupled_renewal.models.experiment import (
    STUDY_REQUIREMENTS,
    ExperimentConfig,
    ExperimentRow,
)
from decoupled_renewal.models.steps import GammaStep

GAMMA = {"family": "gamma", "parameters": {"shape": 1.0}}


class TestExperimentConfig:
    def test_every_study_has_requirements(self):
        assert set(STUDY_REQUIREMENTS) == set(StudyName)

    def test_builds_step(self):
        config = ExperimentConfig(study="forrester", step=GAMMA, t_grid=[50, 100])
        assert config.study == StudyName.forrester
        assert config.step == GammaStep(shape=1)

    @pytest.mark.parametrize(
        "values, message",
        [
            ({"study": "forrester", "step": GAMMA, "t_grid": []}, "requires t_grid"),
            ({"study": "convergence-t22", "step": GAMMA, "t_grid": [1]}, "requires b"),
            ({"study": "rates", "alpha": 0.5}, "requires b_grid"),
            ({"study": "forrester", "step": GAMMA, "t_grid": [100, 50]}, "strictly increasing"),
            ({"study": "forrester", "step": GAMMA, "t_grid": [50], "colour": 1}, "extra fields"),
            ({"study": "rates", "alpha": 1.0, "b_grid": [0.5]}, "alpha"),
            ({"study": "forrester", "step": GAMMA, "t_grid": [50], "seed": -1}, "seed"),
            ({"study": "no-such-study"}, "study"),
            ({"study": "forrester", "step": {"family": "cauchy"}, "t_grid": [50]}, "unknown step family"),
        ],
    )
    def test_invalid(self, values, message):
        with pytest.raises(ValidationError) as excinfo:
            ExperimentConfig(**values)
        assert message in str(excinfo.value)

    def test_describe(self):
        config = ExperimentConfig(
            study="is-compare", step=GAMMA, b=0.5, t_grid=[100], seed=3, n_samples=2000
        )
        assert config.describe() == {
            "study": "is-compare",
            "step": "gamma(shape=1)",
            "b": "0.5",
            "seed": "3",
            "n_samples": "2000",
        }

    def test_describe_omits_sample_count_for_exact_studies(self):
        config = ExperimentConfig(study="forrester", step=GAMMA, t_grid=[50])
        assert "n_samples" not in config.describe()


class TestExperimentRow:
    @pytest.mark.parametrize(
        "observed, predicted, residual",
        [(3.0, 2.5, 0.5), (math.inf, math.inf, 0.0), (math.inf, 2.0, math.inf)],
    )
    def test_residual(self, observed, predicted, residual):
        row = ExperimentRow(t=1, observed=observed, predicted=predicted, runtime=0.1)
        assert row.residual == residual

    def test_csv_row_appends_extras(self):
        row = ExperimentRow(t=1, observed=3, predicted=2, runtime=0.1, extra={"k": 4})
        assert list(row.csv_row()) == ["t", "observed", "predicted", "residual", "runtime", "k"]
