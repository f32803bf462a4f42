"""Run configuration and report documents.

Every level rejects unknown keys. Defaults come from ``config.defaults`` and are
echoed back in each report, so a report's ``config`` re-parses to the same run.
"""
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError as PydanticValidationError, field_validator
from pydantic import ValidationInfo

from config import defaults
from models.system import build_system
from tools.errors import ConfigError, KgError

SCHEMA_VERSION = "1.0"


class Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SystemDocument(Strict):
    d: int = Field(ge=1)
    b: List[float]
    c: List[float]
    # sparse tensors, 1-based equation and spatial indices, derivative slots 0..4
    A: List[List[float]] = Field(default_factory=list)
    B: List[List[float]] = Field(default_factory=list)
    Qprime: List[List[float]] = Field(default_factory=list)

    @field_validator("b", "c")
    @classmethod
    def one_per_equation(cls, v: List[float], info: ValidationInfo) -> List[float]:
        d = info.data.get("d")
        if d is not None and len(v) != d:
            raise ValueError(f"expected {d} values, got {len(v)}")
        return v


class Grid(Strict):
    resolution: int = Field(32, ge=4)
    box_length: float = Field(32.0, gt=0)


class Localization(Strict):
    j: int
    k: int
    l: Optional[int] = None


class Search(Strict):
    alpha: Tuple[float, float] = (-5.0, 5.0)
    beta: Tuple[float, float] = (-5.0, 5.0)
    grid: int = Field(801, ge=3)


class Tolerances(Strict):
    condition_tol: float = defaults["condition_tol"]
    newton_tol: float = defaults["newton_tol"]
    dedup_radius: float = defaults["dedup_radius"]
    conjugation_tol: float = defaults["conjugation_tol"]
    wrap_threshold: float = defaults["wrap_threshold"]
    factor_floor: float = 1e-6


class Caps(Strict):
    N_sub: int = Field(8, ge=1)
    N0_sub: int = Field(4, ge=1)
    gamma_order: int = Field(2, ge=0)
    K0: int = Field(defaults["K0"], ge=1)


class AnalyzeSection(Strict):
    triples: List[Tuple[int, int, int]] = Field(default_factory=list)
    search: Search = Field(default_factory=Search)
    factor_alpha: Tuple[float, float] = (-5.0, 5.0)
    factor_samples: int = Field(401, ge=2)
    sublevel_eps: List[float] = Field(default_factory=lambda: [1e-2, 1e-3, 1e-4, 1e-5, 1e-6])
    sublevel_beta: Tuple[float, float] = (-5.0, 5.0)
    lower_bound_samples: int = Field(201, ge=3)


class EvolveSection(Strict):
    grid: Grid = Field(default_factory=Grid)
    amplitude: float = 1e-3
    width: float = Field(1.0, gt=0)
    T: float = Field(10.0, gt=0)
    dt: float = Field(0.1, gt=0)
    output_dt: Optional[float] = Field(1.0, gt=0)
    scheme: str = "rk4_profile"
    energy_order: int = Field(0, ge=0, le=2)
    z_samples: List[Tuple[int, int]] = Field(default_factory=list)
    snapshots: bool = True


class DecaySection(Strict):
    sigma: int = 1
    preset: Optional[str] = None
    grid: Grid = Field(default_factory=lambda: Grid(resolution=64, box_length=128.0))
    width: float = Field(1.0, gt=0)
    time_grid: List[float] = Field(default_factory=lambda: [5.0, 10.0, 20.0, 40.0])
    window: Optional[Tuple[float, float]] = None
    localization: Optional[Localization] = None


class VerifySection(Strict):
    modules: Optional[List[str]] = None
    skip_slow: bool = False
    seed: int = 0


class RunConfig(Strict):
    system: SystemDocument
    analyze: AnalyzeSection = Field(default_factory=AnalyzeSection)
    evolve: EvolveSection = Field(default_factory=EvolveSection)
    decay: DecaySection = Field(default_factory=DecaySection)
    verify: VerifySection = Field(default_factory=VerifySection)
    tolerances: Tolerances = Field(default_factory=Tolerances)
    caps: Caps = Field(default_factory=Caps)
    out: Optional[str] = None


class ReportDocument(Strict):
    schema_version: str = SCHEMA_VERSION
    command: str
    config: Dict[str, Any]
    results: List[Any] = Field(default_factory=list)
    errors: List[Dict[str, Any]] = Field(default_factory=list)
    tolerances: Dict[str, Any] = Field(default_factory=dict)
    wall_clock: Dict[str, Any] = Field(default_factory=dict)

    def deterministic_json(self) -> str:
        """The document without wall-clock fields, for run-to-run comparison."""
        return json.dumps(self.model_dump(exclude={"wall_clock"}), indent=2, sort_keys=True)

    def write(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.model_dump(), indent=2, sort_keys=True))
        return path


def _key_path(loc) -> str:
    out = ""
    for part in loc:
        out += f"[{part}]" if isinstance(part, int) else (f".{part}" if out else str(part))
    return out


def _check_indices(cfg: RunConfig):
    d = cfg.system.d
    for n, triple in enumerate(cfg.analyze.triples):
        for s in triple:
            if s == 0 or abs(s) > d:
                raise ConfigError(f"index {s} outside ±1..{d}", key_path=f"analyze.triples[{n}]")
    if cfg.decay.sigma == 0 or abs(cfg.decay.sigma) > d:
        raise ConfigError(f"index {cfg.decay.sigma} outside ±1..{d}", key_path="decay.sigma")


def validate_config(document: Dict[str, Any]) -> RunConfig:
    try:
        cfg = RunConfig.model_validate(document)
    except PydanticValidationError as e:
        first = e.errors()[0]
        raise ConfigError(first["msg"], key_path=_key_path(first["loc"]), problems=len(e.errors()))
    _check_indices(cfg)
    try:
        build_system(cfg.system)
    except KgError as e:
        index = e.details.get("index") or e.details.get("tensor") or ""
        raise ConfigError(e.message, key_path=f"system.{index}" if index else "system")
    return cfg


def parse_config(path: Union[str, Path]) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} does not exist", key_path="")
    try:
        document = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path} is not valid JSON: {e.msg} at line {e.lineno}", key_path="")
    return validate_config(document)
