from dataclasses import dataclass
from typing import Union

import numpy as np
from loguru import logger

from models.field import SpectralField
from tools.errors import DomainError, ResolutionError

PLATEAU = 5 / 4
SUPPORT = 8 / 5

ArrayLike = Union[float, np.ndarray]


def _transition(t: np.ndarray) -> np.ndarray:
    # smooth step 0 -> 1 on [0, 1] from exp(-1/t)
    t = np.clip(t, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        b = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return a / (a + b)


def bump(x: ArrayLike) -> ArrayLike:
    """Even smooth cutoff, 1 on [-5/4, 5/4] and 0 outside [-8/5, 8/5]."""
    t = (np.abs(np.asarray(x, dtype=float)) - PLATEAU) / (SUPPORT - PLATEAU)
    out = 1.0 - _transition(t)
    return float(out) if np.ndim(out) == 0 else out


def phi_leq(B: float, x: ArrayLike) -> ArrayLike:
    return bump(np.asarray(x, dtype=float) / 2.0 ** B)


def phi_shell(k: int, x: ArrayLike) -> ArrayLike:
    x = np.asarray(x, dtype=float)
    out = bump(x / 2.0 ** k) - bump(x / 2.0 ** (k - 1))
    return float(out) if np.ndim(out) == 0 else out


def phi_band(k_lo: int, k_hi: int, x: ArrayLike) -> ArrayLike:
    """Σ_{k_lo ≤ k ≤ k_hi} φ_k."""
    x = np.asarray(x, dtype=float)
    out = bump(x / 2.0 ** k_hi) - bump(x / 2.0 ** (k_lo - 1))
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class DyadicIndex:
    j: int
    k: int

    def check(self) -> "DyadicIndex":
        if self.j < 0 or self.j + self.k < 0:
            raise DomainError(f"(j,k)=({self.j},{self.k}) is outside J (need j >= 0 and j + k >= 0)",
                              j=self.j, k=self.k)
        return self

    @property
    def is_floor(self) -> bool:
        return self.j == max(0, -self.k)


def phi_localized(j: int, k: int, x: ArrayLike) -> ArrayLike:
    """φ_j^{(k)}: φ_{≤j} on the lowest admissible j, φ_j above it."""
    index = DyadicIndex(j, k).check()
    return phi_leq(j, x) if index.is_floor else phi_shell(j, x)


def dyadic_shell(kind: str, x: ArrayLike, k: int = None, j: int = None, B: float = None) -> ArrayLike:
    if kind == "shell":
        return phi_shell(k, x)
    if kind == "leq":
        return phi_leq(B, x)
    if kind == "localized":
        return phi_localized(j, k, x)
    raise DomainError(f"unknown cutoff kind {kind!r}", kind=kind)


def _check_frequency_scale(f: SpectralField, k: int):
    lo, hi = PLATEAU * 2.0 ** (k - 1), SUPPORT * 2.0 ** k
    corner = f.nyquist * np.sqrt(3)
    if lo > corner or hi < f.fundamental:
        raise ResolutionError(
            f"frequency shell 2^{k} (|ξ| in [{lo:.4g}, {hi:.4g}]) is outside the lattice range "
            f"[{f.fundamental:.4g}, {corner:.4g}]", k=k)
    if hi > f.nyquist:
        logger.warning(f"Shell k={k} reaches past the Nyquist frequency {f.nyquist:.4g}; result is truncated")
        return ("nyquist",)
    return ()


def max_localization_j(f: SpectralField) -> int:
    """Largest j whose cutoff still has support inside the box."""
    reach = np.sqrt(3) * f.box_length / 2
    return int(np.floor(np.log2(reach / PLATEAU))) + 1


def _check_space_scale(f: SpectralField, index: DyadicIndex):
    if not index.is_floor and PLATEAU * 2.0 ** (index.j - 1) > np.sqrt(3) * f.box_length / 2:
        raise ResolutionError(f"space localization 2^{index.j} exceeds the periodic box of side {f.box_length}",
                              j=index.j)


def project_frequency(f: SpectralField, k: int) -> SpectralField:
    flags = _check_frequency_scale(f, k)
    return f.with_values(f.values * phi_shell(k, f.xi_mag()), flags=f.flags + flags)


def localize_dyadic(f: SpectralField, mode: str, index: DyadicIndex) -> SpectralField:
    """P_k, Q_jk or f*_jk applied to a copy of ``f``."""
    if mode == "P_k":
        return project_frequency(f, index.k)
    index.check()
    if mode not in ("Q_jk", "star_jk"):
        raise DomainError(f"unknown localization mode {mode!r}", mode=mode)
    _check_space_scale(f, index)
    pk = project_frequency(f, index.k)
    cutoff = phi_localized(index.j, index.k, f.radius())
    # φ_j^{(k)}(|x|) is real and the grid is centred, so real fields stay real
    q = SpectralField.from_physical(pk.physical() * cutoff, f.box_length, f.component, tag=pk.tag)
    q = q.with_values(q.values, flags=pk.flags)
    if mode == "Q_jk":
        return q
    return q.with_values(q.values * phi_band(index.k - 2, index.k + 2, f.xi_mag()))
