import csv
import json
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import List, Optional, Dict, Any, Tuple

import numpy as np


def plain(value):
    """numpy scalars/arrays -> JSON-ready python values."""
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return plain(value.tolist())
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if np.isfinite(value) else None
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return value


@dataclass
class ResonancePoint:
    alpha: float
    beta: float
    phi_residual: float
    dbeta_residual: float
    d2beta: float
    hessian_det: float
    hessian_nondegenerate: bool


@dataclass
class ResonanceReport:
    kind: str  # empty | finite | sphere_family | degenerate_origin
    triple: List[int]
    pairs: List[ResonancePoint] = field(default_factory=list)
    rho: Optional[float] = None
    unresolved: List[Tuple[float, float]] = field(default_factory=list)
    lambda_at_Q_zero: List[float] = field(default_factory=list)
    family_residuals: Optional[Dict[str, float]] = None
    search_box: Optional[List[List[float]]] = None
    grid: Optional[int] = None
    tolerances: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return plain(asdict(self))


@dataclass
class DegenerateReport:
    triple: List[int]
    sigma_coeffs: Dict[str, float]
    quad_coeffs: Dict[str, float]
    perfect_square: bool
    second_residual: float
    rho5: Optional[float]
    caseA_lambda: Optional[float]
    case_label: str  # A | B | nondegenerate
    phi_at_origin: float
    caseA_rho7: Optional[float] = None
    caseA_measured_quartic: Optional[float] = None
    tol: float = 1e-12

    def to_dict(self) -> dict:
        return plain(asdict(self))


@dataclass
class DecayFit:
    times: List[float]
    sup_norms: List[float]
    slope: float
    slope_ci: float
    window: Tuple[float, float]
    intercept: float = 0.0
    meta: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return plain(asdict(self))

    def write(self, out_dir: Path, stem: str = "decay") -> Tuple[Path, Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        csv_path = out_dir / f"{stem}.csv"
        with open(csv_path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["t", "sup_norm"])
            for t, s in zip(self.times, self.sup_norms):
                writer.writerow([repr(float(t)), repr(float(s))])
        summary = {k: v for k, v in self.to_dict().items() if k not in ("times", "sup_norms")}
        json_path = out_dir / f"{stem}.json"
        json_path.write_text(json.dumps(summary, indent=2, sort_keys=True))
        return csv_path, json_path
