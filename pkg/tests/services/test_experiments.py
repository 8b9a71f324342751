import math
import time
from unittest import mock

import numpy as np
import pytest
import yaml
from pydantic import ValidationError
from scipy import special

from decoupled_renewal.errors import BudgetExceededError, ConfigurationError, HypothesisError
from decoupled_renewal.models.enum import StudyName
from decoupled_renewal.models.experiment import ExperimentConfig, StudyResult
from decoupled_renewal.services.csv_export import CsvExporter
from decoupled_renewal.services.experiments import (
    RATE_COLUMNS,
    ROW_COLUMNS,
    STUDY_CITATIONS,
    ExperimentService,
    loglog_slope,
)

GAMMA_1 = {"family": "gamma", "parameters": {"shape": 1.0}}


def config_for(study: str, **values) -> ExperimentConfig:
    return ExperimentConfig(study=StudyName(study), **values)


def test_loglog_slope():
    t = [10.0, 100.0, 1000.0]
    assert loglog_slope(t, [3 * x**0.5 for x in t]) == pytest.approx(0.5)
    assert loglog_slope(t, [-(x**2) for x in t]) == pytest.approx(2.0)


class TestExperimentConfiguration:
    @pytest.fixture(autouse=True)
    def initialize(self, injector, tmp_path):
        self.service = injector.get(ExperimentService)
        self.tmp_path = tmp_path

    def write_config(self, values) -> str:
        path = self.tmp_path / "study.yml"
        path.write_text(yaml.safe_dump(values) if not isinstance(values, str) else values)
        return str(path)

    def test_every_preset_validates(self):
        presets = self.service.load_presets()
        assert set(presets) == {study.value for study in StudyName}
        for study in StudyName:
            config = self.service.build_config(study)
            self.service.check_hypotheses(config)

    def test_layers(self):
        path = self.write_config({"study": "forrester", "t_grid": [10, 20], "seed": 3})
        config = self.service.build_config(
            StudyName.forrester, config_path=path, overrides={"seed": 5, "threads": None}
        )
        assert config.t_grid == [10, 20]
        assert config.seed == 5
        assert config.threads is None
        assert config.step.shape == 1.0

    def test_file_for_another_study(self):
        path = self.write_config({"study": "rates"})
        with pytest.raises(ConfigurationError):
            self.service.build_config(StudyName.forrester, config_path=path)

    @pytest.mark.parametrize("text", ["- 1\n- 2\n", "t_grid: [1, 2\n"])
    def test_bad_file(self, text):
        path = self.write_config(text)
        with pytest.raises(ConfigurationError):
            self.service.build_config(StudyName.forrester, config_path=path)

    def test_missing_file(self):
        with pytest.raises(ConfigurationError):
            self.service.build_config(
                StudyName.forrester, config_path=str(self.tmp_path / "nope.yml")
            )

    def test_unknown_key(self):
        path = self.write_config({"t_grid": [10], "colour": "blue"})
        with pytest.raises(ValidationError):
            self.service.build_config(StudyName.forrester, config_path=path)

    def test_unknown_preset(self, app_config, monkeypatch):
        (self.tmp_path / "studies.yml").write_text("not-a-study:\n  b: 0.5\n")
        monkeypatch.setattr(app_config, "settings_dir", str(self.tmp_path))
        with pytest.raises(ConfigurationError):
            self.service.load_presets()

    def test_missing_presets(self, app_config, monkeypatch):
        monkeypatch.setattr(app_config, "settings_dir", str(self.tmp_path))
        assert self.service.load_presets() == {}
        with pytest.raises(ValidationError):
            self.service.build_config(StudyName.forrester)


class TestHypotheses:
    @pytest.fixture(autouse=True)
    def initialize(self, injector):
        self.service = injector.get(ExperimentService)

    @pytest.mark.parametrize(
        "study, values",
        [
            ("exact-prob", {"step": GAMMA_1, "b": 1.0}),
            ("exact-prob", {"step": {"family": "sqrt-exp"}, "b": 0.5}),
            ("convergence-t21", {"step": {"family": "pareto", "parameters": {"tail_index": 3}}, "b": 0.5}),
            ("convergence-t22", {"step": {"family": "pareto", "parameters": {"tail_index": 3}}, "b": 1.5}),
            ("convergence-t22", {"step": {"family": "pareto", "parameters": {"tail_index": 0.5}}, "b": 0.5}),
            ("convergence-t23", {"step": GAMMA_1, "b": 0.5}),
            ("convergence-t23", {"step": {"family": "weibull", "parameters": {"exponent": 0.5}}, "b": 2}),
            ("light-expansion-t24", {"step": GAMMA_1, "b": 1.5}),
            ("light-expansion-t24", {"step": {"family": "pareto", "parameters": {"tail_index": 3}}, "b": 0.5}),
            ("light-expansion-t25", {"step": GAMMA_1, "b": 0.5}),
            ("light-expansion-t25", {"step": {"family": "pareto", "parameters": {"tail_index": 3}}, "b": 2}),
            ("forrester", {"step": {"family": "gamma", "parameters": {"shape": 2}}}),
            ("variance-asymptotics", {"step": {"family": "pareto", "parameters": {"tail_index": 1.5}}}),
            ("ginibre-radii", {"rho": 2.0, "b": 0.5, "t_grid": [0.5, 3]}),
        ],
    )
    def test_violated(self, study, values):
        values.setdefault("t_grid", [10, 20])
        with pytest.raises(HypothesisError):
            self.service.check_hypotheses(config_for(study, **values))

    @pytest.mark.parametrize(
        "study, values",
        [
            ("local-clt", {"step": GAMMA_1}),
            ("variance-asymptotics", {"step": {"family": "pareto", "parameters": {"tail_index": 0.5}}}),
            ("variance-asymptotics", {"step": {"family": "pareto", "parameters": {"tail_index": 3}}}),
            ("light-expansion-t25", {"step": {"family": "weibull", "parameters": {"exponent": 0.5}}, "b": 2}),
        ],
    )
    def test_satisfied(self, study, values):
        self.service.check_hypotheses(config_for(study, t_grid=[10, 20], **values))

    def test_violation_stops_before_work(self):
        with mock.patch.object(self.service, "run_forrester") as run_forrester:
            with pytest.raises(HypothesisError):
                self.service.run(
                    config_for(
                        "forrester",
                        step={"family": "gamma", "parameters": {"shape": 3}},
                        t_grid=[10],
                    )
                )
        run_forrester.assert_not_called()


class TestStudies:
    @pytest.fixture(autouse=True)
    def initialize(self, injector, tmp_path):
        self.service = injector.get(ExperimentService)
        self.exporter = injector.get(CsvExporter)
        self.tmp_path = tmp_path

    def test_forrester(self):
        config = config_for("forrester", step=GAMMA_1, t_grid=[5, 10, 20], threads=2)
        result = self.service.run(config)
        assert result.columns == ROW_COLUMNS
        assert [row["t"] for row in result.rows] == [5, 10, 20]
        for row in result.rows:
            n = np.arange(1, 400)
            direct = -np.sum(np.log(special.gammaincc(n, row["t"])))
            assert row["observed"] == pytest.approx(direct, rel=1e-9)
            assert row["residual"] == pytest.approx(row["observed"] - row["predicted"])
            assert row["runtime"] >= 0
        assert "residual_loglog_slope" in result.summary

    def test_rates(self):
        config = config_for("rates", alpha=0.5, b_grid=[0.5, 2.0])
        result = self.service.run(config)
        assert result.columns == RATE_COLUMNS
        assert [row["b"] for row in result.rows] == [0.5, 2.0]
        assert all(row["J"] > 0 for row in result.rows)

    def test_is_compare(self):
        config = config_for("is-compare", step=GAMMA_1, b=0.5, t_grid=[20], n_samples=20_000, seed=1)
        (row,) = self.service.run(config).rows
        assert row["hits"] > 0
        assert abs(row["observed"] - row["predicted"]) <= 4 * row["stderr"] + 0.05

    def test_is_compare_reproducible(self):
        config = config_for("is-compare", step=GAMMA_1, b=0.5, t_grid=[10, 20], n_samples=2000, seed=8)
        first = [row["observed"] for row in self.service.run(config).rows]
        second = [row["observed"] for row in self.service.run(config.copy(update={"threads": 1})).rows]
        assert first == second

    def test_execute_writes_csv(self):
        config = config_for("forrester", step=GAMMA_1, t_grid=[5, 10])
        path = str(self.tmp_path / "forrester.csv")
        result = self.service.execute(config, path)
        metadata, rows = self.exporter.read_csv(path)
        assert metadata["study"] == "forrester"
        assert metadata["target"] == result.target
        assert metadata["cites"] == "Forrester expansion of the Ginibre hole probability"
        assert float(metadata["residual_loglog_slope"]) == result.summary["residual_loglog_slope"]
        assert "complete" not in metadata
        assert [row["t"] for row in rows] == [5, 10]

    def test_wide_residual_spread_is_reported(self):
        config = config_for("light-expansion-t25", step=GAMMA_1, b=2.0, t_grid=[50, 100])
        measured = StudyResult(
            study=StudyName.light_expansion_t25,
            target="R",
            columns=ROW_COLUMNS + ["k", "residual_over_t"],
            rows=[{"t": 50, "residual_over_t": 0.25}, {"t": 100, "residual_over_t": -0.0625}],
        )
        with mock.patch.object(self.service, "_t_study", return_value=measured), mock.patch.object(
            ExperimentService, "logger", new_callable=mock.PropertyMock
        ) as logger:
            result = self.service.run(config)
        assert result.summary == {"residual_over_t_spread": 4.0, "residual_over_t_max": 0.25}
        assert "exceeds a factor of 2" in logger.return_value.warning.call_args[0][0]

    @pytest.mark.parametrize("study", list(StudyName))
    def test_every_study_cites_its_statement(self, study):
        assert STUDY_CITATIONS[study]
        assert ";" not in STUDY_CITATIONS[study]

    def test_execute_partial(self):
        config = config_for("forrester", step=GAMMA_1, t_grid=[5, 10], budget_seconds=1)
        partial = StudyResult(
            study=StudyName.forrester,
            target="-log P{N(t) = 0}",
            columns=ROW_COLUMNS,
            rows=[{"t": 5, "observed": 1.0, "predicted": 1.0, "residual": 0.0, "runtime": 0.1}],
            complete=False,
        )
        path = str(self.tmp_path / "partial.csv")
        with mock.patch.object(self.service, "run", return_value=partial):
            with pytest.raises(BudgetExceededError) as info:
                self.service.execute(config, path)
        assert (info.value.completed, info.value.total) == (1, 2)
        metadata, rows = self.exporter.read_csv(path)
        assert metadata["complete"] == "false"
        assert len(rows) == 1


class TestDispatch:
    @pytest.fixture(autouse=True)
    def initialize(self, injector):
        self.service = injector.get(ExperimentService)

    def test_grid_order(self):
        config = config_for("rates", alpha=0.5, b_grid=[1.5], threads=4)

        def task(index, point):
            time.sleep(0.05 * (4 - index))
            return point

        results, complete = self.service._dispatch(config, [1.0, 2.0, 3.0, 4.0], task)
        assert complete
        assert results == [1.0, 2.0, 3.0, 4.0]

    def test_budget(self):
        config = config_for("rates", alpha=0.5, b_grid=[1.5], threads=1, budget_seconds=0.5)

        def task(index, point):
            if index:
                time.sleep(2)
            return point

        started = time.monotonic()
        results, complete = self.service._dispatch(config, [1.0, 2.0, 3.0], task)
        assert not complete
        assert results == [1.0]
        assert time.monotonic() - started < 2

    def test_errors_propagate(self):
        config = config_for("rates", alpha=0.5, b_grid=[1.5], threads=2)

        def task(index, point):
            if index == 1:
                raise HypothesisError("b != 1")
            return point

        with pytest.raises(HypothesisError):
            self.service._dispatch(config, [0.5, 1.0], task)

    def test_partial_study_is_marked(self):
        config = config_for("forrester", step=GAMMA_1, t_grid=[5, 10], budget_seconds=1)
        with mock.patch.object(self.service, "_dispatch", return_value=([], False)):
            result = self.service.run(config)
        assert not result.complete
        assert result.rows == []
        assert result.columns == ROW_COLUMNS


class TestEveryStudyRuns:
    @pytest.fixture(autouse=True)
    def initialize(self, injector):
        self.service = injector.get(ExperimentService)

    @pytest.mark.parametrize(
        "study, values, extra_columns",
        [
            ("exact-prob", {"step": GAMMA_1, "b": 0.5, "t_grid": [20, 40]}, ["k"]),
            (
                "exact-prob",
                {"step": {"family": "pareto", "parameters": {"tail_index": 3}}, "b": 0.5, "t_grid": [30]},
                ["k"],
            ),
            (
                "convergence-t21",
                {"step": {"family": "pareto", "parameters": {"tail_index": 0.5}}, "b": 0.5, "t_grid": [100]},
                ["k", "U"],
            ),
            (
                "convergence-t22",
                {"step": {"family": "pareto", "parameters": {"tail_index": 3}}, "b": 0.5, "t_grid": [30, 60]},
                ["k"],
            ),
            (
                "convergence-t23",
                {"step": {"family": "weibull", "parameters": {"exponent": 0.5}}, "b": 0.5, "t_grid": [50]},
                ["k"],
            ),
            ("light-expansion-t24", {"step": GAMMA_1, "b": 0.5, "t_grid": [20, 40]}, ["k", "residual_over_t"]),
            ("light-expansion-t25", {"step": GAMMA_1, "b": 2.0, "t_grid": [20, 40]}, ["k", "residual_over_t"]),
            ("local-clt", {"step": GAMMA_1, "t_grid": [50, 100]}, ["U", "variance", "clt_discrepancy"]),
            (
                "variance-asymptotics",
                {"step": {"family": "gamma", "parameters": {"shape": 2}}, "t_grid": [200]},
                ["ratio"],
            ),
            (
                "ginibre-radii",
                {"rho": 2.0, "b": 0.5, "t_grid": [2, 3], "n_samples": 2000, "seed": 4},
                ["k", "exact_prob", "empirical_prob", "exact_zero", "empirical_zero"],
            ),
        ],
    )
    def test_study(self, study, values, extra_columns):
        config = config_for(study, **values)
        result = self.service.run(config)
        assert result.complete
        assert result.columns == ROW_COLUMNS + extra_columns
        assert [row["t"] for row in result.rows] == config.t_grid
        for row in result.rows:
            assert np.isfinite(row["observed"])
            assert np.isfinite(row["predicted"])

    def test_light_expansion_summary(self):
        config = config_for("light-expansion-t24", step=GAMMA_1, b=0.5, t_grid=[20, 40])
        result = self.service.run(config)
        assert result.summary["residual_over_t_spread"] >= 1

    def test_zero_count_limit(self):
        config = config_for("zero-count-limit", alpha=0.0, b_grid=[0.05, 0.1])
        result = self.service.run(config)
        assert result.columns == ["b", "J", "limit", "gap"]
        assert result.summary["limit"] == pytest.approx(math.pi**2 / 6, rel=1e-6)
        assert [row["b"] for row in result.rows] == [0.05, 0.1]
