"""
Experiment configuration and the rows a study emits.

An ExperimentConfig is assembled from three layers (preset from
settings/studies.yml, then a YAML config file, then CLI flags) and
validated once; unknown keys are rejected at every layer.
"""

import math
from typing import Any, Dict, List, Optional

from pydantic import (
    Field,
    PositiveFloat,
    PositiveInt,
    confloat,
    conint,
    root_validator,
    validator,
)

from decoupled_renewal.models.base import RenewalBaseModel
from decoupled_renewal.models.enum import StudyName
from decoupled_renewal.models.steps import StepDistribution, step_from_config

# Fields each study cannot run without.
STUDY_REQUIREMENTS: Dict[StudyName, tuple] = {
    StudyName.rates: ("alpha", "b_grid"),
    StudyName.zero_count_limit: ("alpha", "b_grid"),
    StudyName.exact_prob: ("step", "b", "t_grid"),
    StudyName.convergence_t21: ("step", "b", "t_grid"),
    StudyName.convergence_t22: ("step", "b", "t_grid"),
    StudyName.convergence_t23: ("step", "b", "t_grid"),
    StudyName.light_expansion_t24: ("step", "b", "t_grid"),
    StudyName.light_expansion_t25: ("step", "b", "t_grid"),
    StudyName.forrester: ("step", "t_grid"),
    StudyName.local_clt: ("step", "t_grid"),
    StudyName.variance_asymptotics: ("step", "t_grid"),
    StudyName.is_compare: ("step", "b", "t_grid"),
    StudyName.ginibre_radii: ("rho", "b", "t_grid"),
}

# Studies whose output depends on n_samples.
_SAMPLING = {StudyName.is_compare, StudyName.ginibre_radii}


class ExperimentConfig(RenewalBaseModel):
    study: StudyName
    step: Optional[StepDistribution] = None
    b: Optional[PositiveFloat] = None
    b_grid: List[PositiveFloat] = Field(default_factory=list)
    t_grid: List[PositiveFloat] = Field(default_factory=list)
    alpha: Optional[confloat(ge=0, lt=1)] = None
    rho: Optional[PositiveFloat] = None
    seed: Optional[conint(ge=0, lt=2**64)] = None
    threads: Optional[PositiveInt] = None
    budget_seconds: Optional[PositiveFloat] = None
    n_samples: PositiveInt = 100_000
    eps_mass: Optional[PositiveFloat] = None
    lattice_cells_log2: Optional[conint(ge=4, le=24)] = None
    output: Optional[str] = None

    @validator("step", pre=True)
    def build_step(cls, value: Any) -> Optional[StepDistribution]:
        if value is None:
            return None
        return step_from_config(value)

    @validator("t_grid", "b_grid")
    def validate_increasing(cls, grid: List[float]) -> List[float]:
        if any(later <= earlier for earlier, later in zip(grid, grid[1:])):
            raise ValueError("grid must be strictly increasing")
        return grid

    @root_validator(skip_on_failure=True)
    def validate_study_fields(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        missing = [
            name
            for name in STUDY_REQUIREMENTS[values["study"]]
            if values.get(name) in (None, [])
        ]
        if missing:
            raise ValueError(
                f"study {values['study'].value} requires {', '.join(missing)}"
            )
        return values

    def describe(self) -> Dict[str, str]:
        """Flat key/value metadata for the CSV comment line."""
        described = {"study": self.study.value}
        if self.step is not None:
            described["step"] = self.step.describe()
        for name in ("b", "alpha", "rho", "seed", "n_samples"):
            value = getattr(self, name)
            if value is not None and (name != "n_samples" or self.study in _SAMPLING):
                described[name] = f"{value:g}" if isinstance(value, float) else str(value)
        return described


class ExperimentRow(RenewalBaseModel):
    """One t-indexed result; `extra` carries study-specific columns."""

    t: float
    observed: float
    predicted: float
    runtime: float
    extra: Dict[str, float] = Field(default_factory=dict)

    @property
    def residual(self) -> float:
        if math.isinf(self.observed) and self.observed == self.predicted:
            return 0.0
        return self.observed - self.predicted

    def csv_row(self) -> Dict[str, float]:
        row = {
            "t": self.t,
            "observed": self.observed,
            "predicted": self.predicted,
            "residual": self.residual,
            "runtime": self.runtime,
        }
        row.update(self.extra)
        return row


class StudyResult(RenewalBaseModel):
    study: StudyName
    # The quantity being measured, with the limit statement it is checked against.
    target: str
    columns: List[str]
    rows: List[Dict[str, float]]
    metadata: Dict[str, str] = Field(default_factory=dict)
    summary: Dict[str, float] = Field(default_factory=dict)
    complete: bool = True
