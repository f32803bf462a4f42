"""Scaled stand-in for the weighted localization norm that controls dispersive decay.

For a piece f of scale (j, k) the value is

    |k| >= K0:  sup_μ ⟨j⟩^{N0} 2^{min(k/2,0)} 2^j ‖Γ^μ f‖₂
    |k| <  K0:  sup_μ (2^{5j/6} ⟨j⟩^{-N0} ‖Γ^μ f‖₂ + ⟨j⟩^{N0} 2^j ‖(Γ^μ f)^‖₁)

with N0 and the vector-field order taken from :class:`DiagnosticCaps`. The
proof-scale exponents are far out of reach, so the number is only meaningful
relative to other values computed with the same caps.
"""
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional

import numpy as np
from loguru import logger

from config import defaults
from dyadic.core import DyadicIndex, localize_dyadic
from flow.core import vector_fields
from models.field import SpectralField
from tools.errors import DomainError, ResolutionError


@dataclass(frozen=True)
class DiagnosticCaps:
    N_sub: int = 8
    N0_sub: int = 4
    gamma_order: int = 2
    K0: int = field(default_factory=lambda: defaults["K0"])

    def __post_init__(self):
        for name in ("N_sub", "N0_sub", "K0"):
            if getattr(self, name) <= 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)}", cap=name)
        if self.gamma_order < 0:
            raise DomainError(f"gamma_order must be nonnegative, got {self.gamma_order}", cap="gamma_order")


def japanese(j: float) -> float:
    return float(np.sqrt(1.0 + j * j))


def z_terms(f: SpectralField, j: int, k: int, caps: DiagnosticCaps = None, K0: int = None) -> Dict[str, float]:
    """Both branch expressions, maximized over the vector-field words, plus the selected value."""
    caps = caps or DiagnosticCaps()
    K0 = caps.K0 if K0 is None else K0
    DyadicIndex(j, k).check()
    words = vector_fields(f, caps.gamma_order, cap=caps.gamma_order)
    l2 = max(g.l2_norm() for g in words.values())
    l1 = max(g.fourier_l1() for g in words.values())
    weight = japanese(j) ** caps.N0_sub
    high = weight * 2.0 ** min(k / 2, 0) * 2.0 ** j * l2
    low = max(2.0 ** (5 * j / 6) / weight * g.l2_norm() + weight * 2.0 ** j * g.fourier_l1()
              for g in words.values())
    branch = "high" if abs(k) >= K0 else "low"
    return {"high": high, "low": low, "branch": branch, "value": high if branch == "high" else low,
            "max_l2": l2, "max_fourier_l1": l1, "words": len(words)}


def z_diagnostic(f: SpectralField, j: int, k: int, caps: DiagnosticCaps = None, K0: int = None) -> float:
    """Weighted (j, k) diagnostic of a localized piece; ``f`` is taken as already localized."""
    return float(z_terms(f, j, k, caps, K0)["value"])


def z_profile(f: SpectralField, j_values: Iterable[int], k_values: Iterable[int],
              caps: DiagnosticCaps = None) -> Dict[str, object]:
    """sup over (j, k) of the diagnostic of Q_jk f, skipping scales the lattice cannot hold."""
    caps = caps or DiagnosticCaps()
    table, skipped = {}, []
    for k in k_values:
        for j in j_values:
            index = DyadicIndex(j, k)
            if j < 0 or j + k < 0:
                continue
            try:
                piece = localize_dyadic(f, "Q_jk", index)
            except ResolutionError as e:
                logger.debug(f"Skipping (j,k)=({j},{k}): {e.message}")
                skipped.append([j, k])
                continue
            table[(j, k)] = z_diagnostic(piece, j, k, caps)
    best: Optional[tuple] = max(table, key=table.get) if table else None
    return {"value": table[best] if best else 0.0, "argmax": list(best) if best else None,
            "table": {f"{j},{k}": v for (j, k), v in table.items()}, "skipped": skipped}
