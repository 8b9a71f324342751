import logging
import os
from datetime import datetime
from typing import Optional

from injector import Module, provider, singleton
from pydantic import BaseSettings, Field, PositiveFloat, PositiveInt, validator

logger = logging.getLogger("decoupled_renewal.app_config")


class QuadratureSettings(BaseSettings):
    """Tolerances handed to scipy's adaptive (QUADPACK) integrators."""

    class Config:
        env_prefix = "QUADRATURE_"

    # Absolute target for the rate-function integrals f_α, f_α′, f_α″.
    abs_tol: PositiveFloat = 1e-10
    # The deviation integrals are compared with closed forms at 1e-8,
    # so they get two extra digits.
    deviation_abs_tol: PositiveFloat = 1e-11
    subdivision_limit: PositiveInt = 10_000
    # P{Z_α > y} below this is treated as the end of the support.
    tail_tol: PositiveFloat = 1e-14


class SurvivalTableSettings(BaseSettings):
    class Config:
        env_prefix = "SURVIVAL_TABLE_"

    # When enabled, P{Z_α > y} is tabulated once per α and interpolated
    # afterwards; the table is read-only once built.
    memoize: bool = True
    size: PositiveInt = 8193


class RootFindingSettings(BaseSettings):
    class Config:
        env_prefix = "ROOT_"

    xtol: PositiveFloat = 1e-13
    residual_tol: PositiveFloat = 1e-10
    max_iterations: PositiveInt = 200
    # e^s overflows past ~709, so brackets never grow beyond |s| = 700.
    bracket_limit: PositiveFloat = 700.0


class ConvolutionSettings(BaseSettings):
    class Config:
        env_prefix = "CONVOLUTION_"

    exact_eps_mass: PositiveFloat = 1e-12
    lattice_eps_mass: PositiveFloat = 1e-8
    # Default lattice width is t / 2**lattice_cells_log2.
    lattice_cells_log2: PositiveInt = 16
    max_enclosure_width: PositiveFloat = 0.05
    ratio_inflation: PositiveFloat = 1.1
    max_terms: PositiveInt = 1_000_000


class SamplerSettings(BaseSettings):
    class Config:
        env_prefix = "SAMPLER_"

    batch_size: PositiveInt = 10_000
    min_samples: PositiveInt = 1_000


class ExperimentSettings(BaseSettings):
    class Config:
        env_prefix = "EXPERIMENT_"

    default_seed: int = 0
    # None means one worker per logical core.
    threads: Optional[PositiveInt] = None
    clt_sigma_span: PositiveFloat = 12.0
    min_variance: PositiveFloat = 1e-8


@singleton
class ApplicationConfig(BaseSettings):
    """
    Base settings for the package. These can be provided by a dotenv file, environment variables, or directly
    during instantiation of this object. The exception is the `settings_dir`, which _must_ be provided; this is
    because the settings_dir must be calculated before being able to load configuration in the settings_dir, which
    is needed to create instances of the ApplicationConfig object.

    Uses:
        # Explicitly declared settings
        ApplicationConfig(settings_dir='/foo/settings', stage='development')

        # Loaded from a .dotenv file:
        ApplicationConfig(_env_file='/foo/settings/blah.dotenv', settings_dir='/foo/settings')

        # Loaded entirely from environment variables:
        ApplicationConfig(settings_dir='/foo/settings')
    """

    class Config:
        # Optionally, you can provide variables via a dotenv file instead of relying on all variables to be set.
        # You can supply the DOTENV_FILE environment variable to set the location of which dotenv file to load.
        env_file = os.environ.get("DOTENV_FILE", ".env")

    settings_dir: str
    stage: str = Field("development", env="DECOUPLED_RENEWAL_STAGE")
    version: Optional[str] = Field(None, env="DECOUPLED_RENEWAL_VERSION")
    start_time: datetime = Field(default_factory=datetime.now)
    logging_config_file: str = Field("logging.yml", env="LOGGING_CONFIG_FILE")
    study_presets_file: str = Field("studies.yml", env="STUDY_PRESETS_FILE")

    # Aggregated Settings
    quadrature_settings: QuadratureSettings = QuadratureSettings()
    survival_table_settings: SurvivalTableSettings = SurvivalTableSettings()
    root_finding_settings: RootFindingSettings = RootFindingSettings()
    convolution_settings: ConvolutionSettings = ConvolutionSettings()
    sampler_settings: SamplerSettings = SamplerSettings()
    experiment_settings: ExperimentSettings = ExperimentSettings()

    @validator("settings_dir")
    def validate_settings_dir(cls, settings_dir: str) -> str:
        if not os.path.isdir(settings_dir):
            logger.warning(f"Settings directory {settings_dir} does not exist.")
        return settings_dir

    @property
    def logging_config_path(self) -> str:
        return os.path.join(self.settings_dir, self.logging_config_file)

    @property
    def study_presets_path(self) -> str:
        return os.path.join(self.settings_dir, self.study_presets_file)


class ApplicationConfigInjectorModule(Module):
    @provider
    @singleton
    def provide_application_config(self) -> ApplicationConfig:
        """
        Creates a singleton instance of the application config using the
        APP_DOTENV_FILE and APP_SETTINGS_DIR environment variables.
        Note that the default (and desired!) behavior is to allow environment variables to override settings loaded
        from APP_DOTENV_FILE.
        """
        # Before we do anything else, we load some bootstrapping environment variables to tell us
        # how to load the rest of our settings.
        settings_dir = os.environ.get(
            "APP_SETTINGS_DIR",
            default=os.path.join(
                os.path.dirname(os.path.abspath(__file__)), "settings"
            ),
        )
        settings_file = os.environ.get("APP_DOTENV_FILE", "base.dotenv")
        settings_file_path = os.path.join(settings_dir, settings_file)
        config = ApplicationConfig(
            _env_file=settings_file_path, settings_dir=settings_dir
        )
        return config
