"""Pydantic models for parameters, results and experiment configuration."""
import math
import re
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.utils.config import config

PurificationMode = Literal["ideal-dep", "noisy-dep", "bennett"]
ChainMode = Literal["paper-faithful", "oracle"]
RoundFidelity = Literal["distilled", "final"]
Preset = Literal["fig3", "threshold-scan", "chain-scan", "decay-scan", "oracle-check"]


class NoiseParams(BaseModel):
    """Reliability of one-qubit operations and projection quality."""

    model_config = ConfigDict(frozen=True)

    p1: float = Field(1.0, ge=0.0, le=1.0, description="Reliability of one-qubit operations")
    eta: float = Field(1.0, ge=0.0, le=1.0, description="Projection quality of measurements")

    @classmethod
    def ideal(cls) -> "NoiseParams":
        return cls(p1=1.0, eta=1.0)

    @property
    def is_ideal(self) -> bool:
        return self.p1 == 1.0 and self.eta == 1.0


class RoundResult(BaseModel):
    """Outcome of one two-pair purification round."""

    f_out: float = Field(ge=0.0, le=1.0)
    p_succ: float = Field(gt=0.0, le=1.0)
    pairs_consumed: int = 2
    # Post-selected stage of a noisy round before the final wave plates; mirrors f_out/p_succ otherwise.
    f_distilled: Optional[float] = Field(None, ge=0.0, le=1.0)
    p_distilled: Optional[float] = Field(None, gt=0.0, le=1.0)

    @model_validator(mode="after")
    def _fill_stage(self):
        if self.f_distilled is None:
            self.f_distilled = self.f_out
        if self.p_distilled is None:
            self.p_distilled = self.p_succ
        return self


class PurificationSchedule(BaseModel):
    """Orbit of the round map up to a target fidelity."""

    rounds: int = Field(ge=0)
    fidelity_trace: list[float]
    expected_pairs: float = Field(ge=1.0)
    success_probabilities: list[float] = Field(default_factory=list)


class ChainConfig(BaseModel):
    """Nested repeater chain parameters."""

    model_config = ConfigDict(frozen=True)

    segments: int = Field(ge=1, description="Number of elementary links N (power of two)")
    f0: float = Field(ge=0.0, le=1.0, description="Initial fidelity of every link")
    rounds_per_level: int = Field(0, ge=0, description="Purification rounds M per nesting level")
    noise: NoiseParams = Field(default_factory=NoiseParams.ideal)
    mode: ChainMode = "paper-faithful"
    # None picks "final" under noise and "distilled" at ideal operations, where the final stage saturates at 1
    round_fidelity: Optional[RoundFidelity] = None

    @field_validator("segments")
    @classmethod
    def _power_of_two(cls, value: int) -> int:
        if value & (value - 1):
            raise ValueError(f"segments must be a power of two, got {value}")
        return value

    @model_validator(mode="after")
    def _oracle_scale(self):
        if self.mode == "oracle" and self.segments > config.ORACLE_MAX_SEGMENTS:
            raise ValueError(
                f"oracle mode supports at most {config.ORACLE_MAX_SEGMENTS} segments, got {self.segments}"
            )
        return self

    @property
    def levels(self) -> int:
        return int(math.log2(self.segments))

    @property
    def stage(self) -> RoundFidelity:
        if self.round_fidelity is not None:
            return self.round_fidelity
        return "distilled" if self.noise.is_ideal else "final"

    @classmethod
    def from_distance(cls, distance_km: float, segments: int, **kwargs) -> "ChainConfig":
        """Chain whose links span distance_km / segments each, f0 from the distance extrapolation."""
        from src.quantum.noise import fidelity_at_distance

        return cls(segments=segments, f0=fidelity_at_distance(distance_km / segments), **kwargs)


class ChainReport(BaseModel):
    """End-to-end result of a repeater run."""

    final_fidelity: float = Field(ge=0.0, le=1.0)
    per_level_fidelity: list[float]
    expected_cost: float
    levels: int = Field(ge=0)
    final_junk: float = 0.0


class CompareReport(BaseModel):
    """Analytic value against oracle value."""

    name: str = ""
    analytic: float
    oracle: float
    difference: float
    tolerance: float
    passed: bool
    expected_gap: bool = False


class ExperimentConfig(BaseModel):
    """Validated experiment configuration with defaults filled in."""

    preset: Preset = "fig3"
    f_min: float = Field(0.5, ge=0.0, le=1.0)
    f_max: float = Field(1.0, ge=0.0, le=1.0)
    f_step: float = Field(0.01, gt=0.0, le=1.0)
    p1: float = Field(default_factory=lambda: config.DEFAULT_P1, ge=0.0, le=1.0)
    eta: float = Field(default_factory=lambda: config.DEFAULT_ETA, ge=0.0, le=1.0)
    p1_grid: list[float] = Field(default_factory=lambda: [0.95, 0.96, 0.97, 0.98, 0.99, 1.0])
    eta_grid: list[float] = Field(default_factory=lambda: [0.98, 0.99, 1.0])
    segments: list[int] = Field(default_factory=lambda: [2, 4, 8, 16])
    rounds: list[int] = Field(default_factory=lambda: [0, 1, 2, 3])
    f0: float = Field(0.96, ge=0.0, le=1.0)
    n_max: int = Field(16, ge=2)
    mode: ChainMode = "paper-faithful"
    round_fidelity: Optional[RoundFidelity] = None
    samples: int = Field(100, ge=1)
    seed: int = 7
    tolerance: float = Field(default_factory=lambda: config.ORACLE_TOLERANCE, gt=0.0)
    workers: int = Field(default_factory=lambda: config.MAX_WORKERS, ge=1)
    out: Optional[str] = None

    @field_validator("p1_grid", "eta_grid")
    @classmethod
    def _probability_grid(cls, values: list[float]) -> list[float]:
        if not values:
            raise ValueError("grid must not be empty")
        for v in values:
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"grid value {v} outside [0, 1]")
        return values

    @field_validator("segments", "rounds")
    @classmethod
    def _count_grid(cls, values: list[int]) -> list[int]:
        if not values:
            raise ValueError("grid must not be empty")
        if any(v < 0 for v in values):
            raise ValueError("counts must be non-negative")
        return values

    @field_validator("out")
    @classmethod
    def _readable_path(cls, value: Optional[str]) -> Optional[str]:
        if value is not None and re.search(r"\s#", value):
            raise ValueError("whitespace before '#' would start a comment in the config file")
        return value

    @model_validator(mode="after")
    def _f_grid(self):
        if self.f_min > self.f_max:
            raise ValueError(f"f_min {self.f_min} exceeds f_max {self.f_max}")
        return self

    @property
    def noise(self) -> NoiseParams:
        return NoiseParams(p1=self.p1, eta=self.eta)


class ResultTable(BaseModel):
    """Rectangular table of results plus a metadata header."""

    columns: list[str]
    rows: list[list[float | int | str]] = Field(default_factory=list)
    metadata: dict[str, str] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _rectangular(self):
        width = len(self.columns)
        for index, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(f"row {index} has {len(row)} cells, expected {width}")
            for cell in row:
                if isinstance(cell, float) and not math.isfinite(cell):
                    raise ValueError(f"row {index} holds a non-finite value")
        return self

    def column(self, name: str) -> list:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]
