import os
from unittest import mock

import pytest
from injector import Injector

from decoupled_renewal.app import create_app_injector
from decoupled_renewal.app_config import (
    ApplicationConfig,
    ConvolutionSettings,
    SamplerSettings,
)


class TestApplicationConfig:
    @pytest.fixture(autouse=True)
    def configure_base(self, injector: Injector):
        self.injector = injector
        self.app_config = injector.get(ApplicationConfig)

    def test_app_config_is_singleton(self):
        assert id(self.app_config) == id(self.injector.get(ApplicationConfig))

    def test_app_config_has_fields(self):
        expected_field_names = {
            "settings_dir",
            "stage",
            "version",
            "start_time",
            "logging_config_file",
            "study_presets_file",
            "quadrature_settings",
            "survival_table_settings",
            "root_finding_settings",
            "convolution_settings",
            "sampler_settings",
            "experiment_settings",
        }
        assert set(self.app_config.dict().keys()) == expected_field_names

    def test_settings_files_exist(self):
        assert os.path.exists(self.app_config.logging_config_path)
        assert os.path.exists(self.app_config.study_presets_path)


class TestEnvironmentOverrides:
    def test_settings_dir(self, tmp_path):
        (tmp_path / "base.dotenv").write_text("DECOUPLED_RENEWAL_STAGE=test\n")
        with mock.patch.dict(os.environ, {"APP_SETTINGS_DIR": str(tmp_path)}):
            config = create_app_injector().get(ApplicationConfig)
        assert config.settings_dir == str(tmp_path)
        assert config.stage == "test"
        assert config.study_presets_path == os.path.join(str(tmp_path), "studies.yml")

    def test_prefixed_settings(self):
        with mock.patch.dict(
            os.environ, {"CONVOLUTION_LATTICE_CELLS_LOG2": "12", "SAMPLER_BATCH_SIZE": "500"}
        ):
            assert ConvolutionSettings().lattice_cells_log2 == 12
            assert SamplerSettings().batch_size == 500
