import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
from scipy import fft as sfft

from config import workers

PHYSICAL_REAL = "physical-real"
COMPLEX = "complex"


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier coefficients of a periodic field on an n³ lattice.

    ``values`` is the unnormalized DFT of the physical samples, taken on the
    centred grid x = (p - n/2)·L/n, so lattice frequencies are 2π·q/L per axis.
    """
    values: np.ndarray
    box_length: float
    component: Optional[int] = None
    tag: str = COMPLEX
    flags: Tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.ndim != 3 or len(set(values.shape)) != 1:
            raise ValueError(f"values must be an n×n×n array, got shape {values.shape}")
        if not self.box_length > 0:
            raise ValueError(f"box_length must be positive, got {self.box_length}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def resolution(self) -> int:
        return self.values.shape[0]

    @property
    def spacing(self) -> float:
        return self.box_length / self.resolution

    @property
    def nyquist(self) -> float:
        return np.pi / self.spacing

    @property
    def fundamental(self) -> float:
        return 2 * np.pi / self.box_length

    @classmethod
    def from_physical(cls, samples: np.ndarray, box_length: float, component: Optional[int] = None,
                      tag: Optional[str] = None) -> "SpectralField":
        samples = np.asarray(samples)
        if tag is None:
            tag = PHYSICAL_REAL if np.isrealobj(samples) else COMPLEX
        return cls(sfft.fftn(samples, workers=workers), box_length, component, tag)

    @classmethod
    def zeros(cls, resolution: int, box_length: float, component: Optional[int] = None) -> "SpectralField":
        return cls(np.zeros((resolution,) * 3, dtype=complex), box_length, component, PHYSICAL_REAL)

    def with_values(self, values: np.ndarray, tag: Optional[str] = None, flags: Tuple[str, ...] = None,
                    component: Optional[int] = "keep") -> "SpectralField":
        return replace(self, values=values, tag=self.tag if tag is None else tag,
                       flags=self.flags if flags is None else flags,
                       component=self.component if component == "keep" else component)

    def physical(self) -> np.ndarray:
        out = sfft.ifftn(self.values, workers=workers)
        return out.real if self.tag == PHYSICAL_REAL else out

    def wavenumbers(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        k = sfft.fftfreq(self.resolution, d=self.spacing) * 2 * np.pi
        return np.meshgrid(k, k, k, indexing="ij", sparse=True)

    def xi_mag(self) -> np.ndarray:
        kx, ky, kz = self.wavenumbers()
        return np.sqrt(kx ** 2 + ky ** 2 + kz ** 2)

    def coords(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        x = (np.arange(self.resolution) - self.resolution // 2) * self.spacing
        return np.meshgrid(x, x, x, indexing="ij", sparse=True)

    def radius(self) -> np.ndarray:
        x, y, z = self.coords()
        return np.sqrt(x ** 2 + y ** 2 + z ** 2)

    def l2_norm(self) -> float:
        # Parseval: dx³ Σ|f|² = dx³/n³ Σ|values|²
        n3 = self.resolution ** 3
        return float(np.sqrt(self.spacing ** 3 / n3 * np.sum(np.abs(self.values) ** 2)))

    def fourier_l1(self) -> float:
        """‖f̂‖_{L¹} of the continuous transform, Riemann sum over the lattice."""
        dxi = self.fundamental ** 3
        return float(np.sum(np.abs(self.values)) * self.spacing ** 3 * dxi / (2 * np.pi) ** 3)

    def sup_norm(self, padding: int = 4, max_size: int = 256) -> float:
        padding = max(1, min(padding, max_size // self.resolution))
        if padding == 1:
            return float(np.max(np.abs(self.physical())))
        return float(np.max(np.abs(zero_pad(self.values, padding))))

    def conjugate_defect(self) -> float:
        """max |v(ξ) - conj v(-ξ)|, zero for real physical data."""
        return float(np.max(np.abs(self.values - np.conj(reflect(self.values))))) if self.values.size else 0.0

    def __add__(self, other: "SpectralField") -> "SpectralField":
        return self.with_values(self.values + other.values)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        return self.with_values(self.values - other.values, tag=COMPLEX if self.tag != other.tag else None)

    def scaled(self, s: complex) -> "SpectralField":
        real = np.isreal(s) and self.tag == PHYSICAL_REAL
        return self.with_values(self.values * s, tag=PHYSICAL_REAL if real else COMPLEX)

    def dump(self, path: Union[str, Path]) -> Tuple[Path, Path]:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        raw = np.ascontiguousarray(self.values, dtype="<c16")
        path.write_bytes(raw.tobytes(order="C"))
        sidecar = path.with_suffix(path.suffix + ".json")
        sidecar.write_text(json.dumps({"component": self.component, "box_length": self.box_length,
                                       "resolution": self.resolution, "tag": self.tag}, indent=2))
        return path, sidecar

    @classmethod
    def load(cls, path: Union[str, Path]) -> "SpectralField":
        path = Path(path)
        meta = json.loads(path.with_suffix(path.suffix + ".json").read_text())
        n = int(meta["resolution"])
        values = np.frombuffer(path.read_bytes(), dtype="<c16").reshape((n, n, n)).copy()
        return cls(values, float(meta["box_length"]), meta.get("component"), meta.get("tag", COMPLEX))


def reflect(values: np.ndarray) -> np.ndarray:
    """v(ξ) -> v(-ξ) on the FFT lattice."""
    return np.roll(np.flip(values, axis=(0, 1, 2)), 1, axis=(0, 1, 2))


def zero_pad(values: np.ndarray, factor: int) -> np.ndarray:
    """Physical samples of the trigonometric interpolant on a factor-times finer grid."""
    n = values.shape[0]
    m = n * factor
    padded = np.zeros((m, m, m), dtype=complex)
    h = n // 2
    blocks = [(slice(0, h), slice(0, h)), (slice(n - h, n), slice(m - h, m))]
    for sx, tx in blocks:
        for sy, ty in blocks:
            for sz, tz in blocks:
                padded[tx, ty, tz] = values[sx, sy, sz]
    return sfft.ifftn(padded, workers=workers) * factor ** 3
