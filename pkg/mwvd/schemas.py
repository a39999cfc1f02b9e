"""Pydantic models for experiment configuration, trial output and dumps"""
from typing import Literal, Optional

from pydantic import BaseModel, ValidationError, field_validator, model_validator

from .config import BOX_FACTOR, MASTER_SEED, WORKERS
from .errors import ExperimentConfigError, ModelSpecError
from .models import PermutedMultiset, parse_model

Kind = Literal["overlay", "diagram", "candidate", "minima", "lowerbound", "envelope"]

CSV_COLUMNS = ["trial", "n", "model", "seed", "overlay_v", "overlay_e", "overlay_f",
               "max_candidate", "diagram_v", "minima_z", "wall_ms"]

COUNT_FIELDS = ["overlay_v", "overlay_e", "overlay_f", "overlay_total", "max_candidate", "diagram_v", "minima_z"]

#Field each kind is fitted on unless count_field says otherwise
DEFAULT_COUNT_FIELD = {
    "overlay": "overlay_total",
    "lowerbound": "overlay_total",
    "diagram": "diagram_v",
    "candidate": "max_candidate",
    "minima": "minima_z",
    "envelope": "overlay_v",
}


#Experiment configuration
class ExperimentConfig(BaseModel):
    kind: Kind
    n_values: list[int]
    trials: int = 1
    model: str = "permuted:linear"
    seed: int = MASTER_SEED
    out: Optional[str] = None
    jitter: float = 0.0  #relative to the site diameter; 0 means jitter only on retry
    box_factor: float = BOX_FACTOR
    workers: int = WORKERS
    oracle: bool = False
    plot: bool = True
    timing: bool = True
    count_field: Optional[str] = None

    class Config:
        extra = "forbid"

    @field_validator("n_values")
    @classmethod
    def n_values_ascending(cls, v):
        if not v or any(n < 1 for n in v):
            raise ValueError("n values must be positive")
        if any(a >= b for a, b in zip(v, v[1:])):
            raise ValueError("n values must be strictly ascending")
        return v

    @field_validator("trials", "workers")
    @classmethod
    def at_least_one(cls, v):
        if v < 1:
            raise ValueError("must be at least 1")
        return v

    @field_validator("seed")
    @classmethod
    def nonnegative_seed(cls, v):
        if v < 0:
            raise ValueError("seed must be nonnegative")
        return v

    @field_validator("jitter")
    @classmethod
    def jitter_range(cls, v):
        if v != 0 and not v >= 1e-9:
            raise ValueError("jitter must be 0 or at least 1e-9 (relative to the site diameter)")
        return v

    @field_validator("box_factor")
    @classmethod
    def box_factor_range(cls, v):
        if not v >= 1.0:
            raise ValueError("box factor must be at least 1")
        return v

    @field_validator("count_field")
    @classmethod
    def known_field(cls, v):
        if v is not None and v not in COUNT_FIELDS:
            raise ValueError(f"count field must be one of {', '.join(COUNT_FIELDS)}")
        return v

    @field_validator("model")
    @classmethod
    def parsable_model(cls, v):
        try:
            parse_model(v)
        except ModelSpecError as e:
            raise ValueError(str(e)) from None
        return v

    @model_validator(mode="after")
    def feasible(self):
        check_feasible(self)
        return self

    @property
    def fit_field(self) -> str:
        return self.count_field or DEFAULT_COUNT_FIELD[self.kind]

    def sites_for(self, n: int) -> int:
        return 2 * n if self.kind == "lowerbound" else n


def build_config(**fields) -> ExperimentConfig:
    """ExperimentConfig with validation failures reported as ExperimentConfigError"""
    try:
        return ExperimentConfig(**fields)
    except ValidationError as e:
        problems = "; ".join(
            (".".join(map(str, err["loc"])) + ": " if err["loc"] else "") + err["msg"] for err in e.errors()
        )
        raise ExperimentConfigError(problems) from None


def check_feasible(cfg: ExperimentConfig):
    """Reject kind/model combinations that cannot run, before any trial starts"""
    model = parse_model(cfg.model)
    if cfg.kind == "lowerbound" and not model.equal_nominal_weights:
        raise ExperimentConfigError(
            f"lowerbound needs a random insertion order (permuted:* or one-valued iid:discrete), got '{cfg.model}'"
        )
    if isinstance(model, PermutedMultiset):
        bad = [n for n in cfg.n_values if cfg.sites_for(n) != len(model.weights)]
        if bad and cfg.kind != "envelope":
            raise ExperimentConfigError(f"multiset of {len(model.weights)} weights cannot serve n = {bad}")
    if cfg.oracle and cfg.kind != "diagram":
        raise ExperimentConfigError("--oracle only applies to the diagram kind")


#Trial output
class TrialRecord(BaseModel):
    trial: int
    n: int
    model: str
    seed: int
    overlay_v: Optional[int] = None
    overlay_e: Optional[int] = None
    overlay_f: Optional[int] = None
    max_candidate: Optional[int] = None
    diagram_v: Optional[int] = None
    minima_z: Optional[int] = None
    wall_ms: float = 0.0

    @property
    def overlay_total(self) -> Optional[int]:
        if self.overlay_v is None or self.overlay_e is None or self.overlay_f is None:
            return None
        return self.overlay_v + self.overlay_e + self.overlay_f

    def value(self, field: str) -> Optional[int]:
        return getattr(self, field)

    def csv_row(self) -> list[str]:
        row = []
        for column in CSV_COLUMNS:
            v = getattr(self, column)
            if column == "wall_ms":
                row.append(f"{v:.3f}")
            else:
                row.append("" if v is None else str(v))
        return row


#Growth fitting
class GrowthLawFit(BaseModel):
    law: str
    coefficient: float
    residual: float


class GrowthFit(BaseModel):
    field: str
    n_values: list[int]
    means: list[float]
    laws: list[GrowthLawFit]
    best_law: Optional[str] = None
    degenerate: bool = False
    doubling_ratios: list[float]


class NSummary(BaseModel):
    n: int
    trials: int
    means: dict[str, float]
    stderr: dict[str, float]


class ExperimentSummary(BaseModel):
    config: ExperimentConfig
    per_n: list[NSummary]
    fit: Optional[GrowthFit] = None


#Single-instance dumps
class VertexDump(BaseModel):
    x: float
    y: float
    triple: list[int]


class CountsDump(BaseModel):
    V: int
    E: Optional[int]
    F: Optional[int]


class DiagramDump(BaseModel):
    n: int
    seed: int
    model: str
    provenance: Literal["oracle", "fast"]
    vertices: list[VertexDump]
    counts: CountsDump


class OverlayVertexDump(BaseModel):
    x: float
    y: float
    frame: bool


class OverlayEdgeDump(BaseModel):
    u: int
    v: int
    frame: bool


class OverlayFaceDump(BaseModel):
    id: int
    representative: list[float]
    candidates: list[int]


class ComplexityDump(BaseModel):
    V: int
    E: int
    F: int
    total: int


class OverlayDump(BaseModel):
    n: int
    seed: int
    model: str
    box: list[float]
    vertices: list[OverlayVertexDump]
    edges: list[OverlayEdgeDump]
    faces: list[OverlayFaceDump]
    complexity: ComplexityDump
