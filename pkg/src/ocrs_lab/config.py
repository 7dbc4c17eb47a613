"""Validated run configurations, one model per subcommand.

Unknown fields are rejected everywhere.  ``seed``, ``trials`` and ``threads``
may appear in the file; command-line flags and ``OCRS_LAB_*`` environment
variables take precedence over them.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import InputError

U64 = 2**64


class Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class RunSettings(Strict):
    schema_version: Optional[Literal[1]] = None
    seed: Optional[int] = Field(default=None, ge=0, lt=U64)
    trials: Optional[int] = Field(default=None, ge=1)
    threads: Optional[int] = Field(default=None, ge=1)


class EstimatorConfig(Strict):
    mode: Literal["auto", "exact", "analytic", "monte-carlo"] = "auto"
    samples: int = Field(default=4000, ge=1)
    delta: float = Field(default=1e-3, gt=0, lt=1)
    policy: Literal["raise", "conservative"] = "raise"
    max_samples: int = Field(default=64000, ge=1)

    @model_validator(mode="after")
    def _samples(self):
        if self.max_samples < self.samples:
            raise ValueError("max_samples must be >= samples")
        return self


class CertificateEntry(Strict):
    set: list[int]
    weight: float = Field(ge=0)


class MarginalsConfig(Strict):
    scale: Optional[float] = Field(default=None, gt=0, le=1)
    certificate: Optional[list[CertificateEntry]] = None
    generator: Optional[Literal["uniform-cyclic"]] = None

    @model_validator(mode="after")
    def _one_source(self):
        if (self.certificate is None) == (self.generator is None):
            raise ValueError("give exactly one of 'certificate' or 'generator'")
        return self


class OcrsSelectConfig(RunSettings):
    name: str = "ocrs-select"
    matroid: Optional[dict[str, Any]] = None
    matroid_file: Optional[str] = None
    k: int = Field(default=1, ge=1)
    b: Union[float, Literal["auto"]] = "auto"
    marginals: MarginalsConfig
    downsample: bool = True
    shrink: Optional[float] = Field(default=None, gt=0, le=1)
    estimator: EstimatorConfig = EstimatorConfig()
    order_policy: Literal["fixed", "reverse", "uniform-random", "worst-of-list"] = "fixed"
    orders: Optional[list[list[int]]] = None
    run_logs: int = Field(default=0, ge=0, le=1000)

    @field_validator("b")
    @classmethod
    def _b(cls, v):
        if v != "auto" and not 0 < v <= 1:
            raise ValueError("b must lie in (0, 1] or be 'auto'")
        return v

    @model_validator(mode="after")
    def _matroid_source(self):
        if (self.matroid is None) == (self.matroid_file is None):
            raise ValueError("give exactly one of 'matroid' or 'matroid_file'")
        return self


class GamblerConfig(Strict):
    kind: Literal["greedy-threshold", "accept-all-feasible", "ocrs-reduction"]
    threshold: Optional[float] = None

    @model_validator(mode="after")
    def _threshold(self):
        if (self.kind == "greedy-threshold") != (self.threshold is not None):
            raise ValueError("'threshold' is required for greedy-threshold and only for it")
        return self


class ReductionConfig(Strict):
    samples: int = Field(default=2000, ge=1)
    b: Union[float, Literal["auto"]] = "auto"
    estimator: EstimatorConfig = EstimatorConfig(policy="conservative")


class ProphetRatioConfig(RunSettings):
    instance: Optional[dict[str, Any]] = None
    instance_file: Optional[str] = None
    gamblers: list[GamblerConfig] = [GamblerConfig(kind="accept-all-feasible"), GamblerConfig(kind="ocrs-reduction")]
    reduction: ReductionConfig = ReductionConfig()
    trial_table: bool = True

    @model_validator(mode="after")
    def _source(self):
        if (self.instance is None) == (self.instance_file is None):
            raise ValueError("give exactly one of 'instance' or 'instance_file'")
        if not self.gamblers:
            raise ValueError("at least one gambler is required")
        return self


class GirthBoundConfig(RunSettings):
    graphs: list[str] = ["petersen", "heawood", "pg2-4", "pg2-9"]
    graph_files: list[str] = []
    eps: list[float] = [0.1, 0.25]
    reduction_samples: int = Field(default=2000, ge=1)
    estimator_samples: int = Field(default=2000, ge=1)

    @field_validator("eps")
    @classmethod
    def _eps(cls, v):
        if not v or any(not 0 < e < 1 for e in v):
            raise ValueError("every eps must lie in (0, 1)")
        return v


class FunctionConfig(Strict):
    kind: Literal["capped-sum", "occupancy", "max", "matroid-rank"]
    dim: int = Field(default=1000, ge=1, le=50_000)
    p: float = Field(default=0.5, ge=0, le=1)
    cap: Optional[int] = Field(default=None, ge=0)
    k: int = Field(default=100, ge=1)
    base_elements: int = Field(default=4, ge=1)
    capacity: int = Field(default=2, ge=1)
    graph: str = "petersen"


class CounterexampleConfig(Strict):
    n: int = 1000
    k: int = 10
    samples: int = Field(default=100_000, ge=1)


class ConcentrationConfig(RunSettings):
    functions: list[FunctionConfig] = [
        FunctionConfig(kind="capped-sum", dim=1000, p=0.5, cap=520),
        FunctionConfig(kind="occupancy", p=0.35),
        FunctionConfig(kind="max", dim=200, p=0.01),
    ]
    grid: Optional[list[tuple[float, float]]] = None
    grid_k: int = Field(default=100, ge=2)
    mean_samples: Optional[int] = Field(default=None, ge=1)
    counterexample: Optional[CounterexampleConfig] = CounterexampleConfig()


class UniformSuiteParams(Strict):
    k: int = Field(default=1, ge=1)
    n: Optional[int] = Field(default=None, ge=1)
    b: Optional[float] = Field(default=None, gt=0, le=1)
    eps: float = Field(default=0.25, gt=0, lt=1)


class GraphicCatalogParams(Strict):
    graph: str = "petersen"
    k: int = Field(default=2, ge=1)
    b: Optional[float] = Field(default=None, gt=0, le=1)
    forests: int = Field(default=8, ge=1)


class OverloadedParams(Strict):
    blocks: int = Field(default=3, ge=1)
    b: Optional[float] = Field(default=None, gt=0, le=1)


class HardGirthParams(Strict):
    graph: str = "petersen"
    eps: float = Field(default=0.25, gt=0, lt=1)


FAMILY_PARAMS = {
    "uniform-suite": UniformSuiteParams,
    "graphic-catalog": GraphicCatalogParams,
    "overloaded-partition": OverloadedParams,
    "hard-girth": HardGirthParams,
}


class GenInstanceConfig(RunSettings):
    family: Literal["uniform-suite", "graphic-catalog", "overloaded-partition", "hard-girth"]
    params: dict[str, Any] = {}

    def typed_params(self):
        try:
            return FAMILY_PARAMS[self.family](**self.params)
        except ValidationError as exc:
            raise InputError(f"invalid {self.family} parameters: {_first_error(exc)}") from exc


class VerifyOraclesConfig(RunSettings):
    corpus: Optional[list[str]] = None
    max_k: int = Field(default=3, ge=1, le=4)
    occupancy_ks: list[int] = [2, 3, 5]
    occupancy_max_n: int = Field(default=6, ge=1, le=8)


MODELS = {
    "ocrs-select": OcrsSelectConfig,
    "prophet-ratio": ProphetRatioConfig,
    "girth-bound": GirthBoundConfig,
    "concentration-sweep": ConcentrationConfig,
    "gen-instance": GenInstanceConfig,
    "verify-oracles": VerifyOraclesConfig,
}


def _first_error(exc: ValidationError) -> str:
    err = exc.errors()[0]
    loc = ".".join(str(p) for p in err.get("loc", ())) or "<root>"
    return f"{loc}: {err.get('msg')}"


def read_document(path: str | Path) -> dict:
    """Parse a JSON or YAML file into a mapping."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text) if str(path).endswith(".json") else yaml.safe_load(text)
    except (ValueError, yaml.YAMLError) as exc:
        raise InputError(f"cannot parse {path}: {exc}") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise InputError(f"{path} must contain a mapping")
    return data


def parse(command: str, data: dict):
    try:
        return MODELS[command](**data)
    except ValidationError as exc:
        raise InputError(f"invalid {command} config: {_first_error(exc)}") from exc
    except TypeError as exc:
        raise InputError(f"invalid {command} config: {exc}") from exc
