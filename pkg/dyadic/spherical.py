"""Angular band projectors S_l and the zonal kernel.

S_l acts on the Fourier lattice one exact-radius shell at a time: the lattice
points sharing |ξ| carry a degree-graded orthogonal decomposition built from
spherical harmonics restricted to those points. Radial multipliers such as P_k
are constant on a shell, so S_l commutes with them exactly.
"""
from typing import Dict, List, Tuple

import numpy as np
from loguru import logger
from scipy import special

from config import defaults
from dyadic.core import bump, PLATEAU, SUPPORT
from models.field import SpectralField
from tools.errors import BandLimitError, DomainError
from tools.singleton import KeyedSingleton


def degree_weight(l: int, q) -> np.ndarray:
    """φ_l(q), with φ_{≤0} on the lowest band."""
    q = np.asarray(q, dtype=float)
    if l < 0:
        raise DomainError(f"angular band l must be >= 0, got {l}", l=l)
    if l == 0:
        return bump(q)
    return bump(q / 2.0 ** l) - bump(q / 2.0 ** (l - 1))


def band_limit(l: int) -> int:
    return int(np.floor(SUPPORT * 2.0 ** l))


def _harmonics(points: np.ndarray, q: int) -> np.ndarray:
    """Columns Y_q^m(p/|p|), m = -q..q, for integer lattice directions."""
    x, y, z = points.T.astype(float)
    r = np.sqrt(x * x + y * y + z * z)
    polar = np.arccos(np.clip(z / r, -1.0, 1.0))
    azimuth = np.arctan2(y, x)
    return np.stack([special.sph_harm_y(q, m, polar, azimuth) for m in range(-q, q + 1)], axis=1)


class ShellBases(metaclass=KeyedSingleton):
    """Per-shell orthonormal bases graded by degree, cached per lattice size."""
    singleton_key = "resolution"

    def __init__(self, resolution: int = None, max_degree: int = None):
        self.resolution = resolution
        self.max_degree = defaults["max_degree"] if max_degree is None else max_degree
        n = resolution
        q = np.fft.fftfreq(n) * n
        qx, qy, qz = np.meshgrid(q, q, q, indexing="ij")
        r2 = (qx ** 2 + qy ** 2 + qz ** 2).astype(np.int64).ravel()
        lattice = np.stack([qx.ravel(), qy.ravel(), qz.ravel()], axis=1).astype(np.int64)
        order = np.argsort(r2, kind="stable")
        keys, starts = np.unique(r2[order], return_index=True)
        self.shells: List[Tuple[np.ndarray, List[Tuple[int, np.ndarray]]]] = []
        self.top_degree = 0
        bounds = list(starts[1:]) + [len(order)]
        for key, start, stop in zip(keys, starts, bounds):
            members = order[start:stop]
            if key == 0:
                self.shells.append((members, [(0, np.ones((1, 1), dtype=complex))]))
                continue
            blocks = self._graded_basis(lattice[members])
            self.top_degree = max(self.top_degree, blocks[-1][0])
            self.shells.append((members, blocks))
        logger.debug(f"Built {len(self.shells)} shell bases for n={n}, top degree {self.top_degree}")

    def _graded_basis(self, points: np.ndarray) -> List[Tuple[int, np.ndarray]]:
        size = len(points)
        basis = np.zeros((size, 0), dtype=complex)
        blocks = []
        for q in range(self.max_degree + 1):
            Y = _harmonics(points, q)
            Y = Y - basis @ (basis.conj().T @ Y)
            Y = Y - basis @ (basis.conj().T @ Y)
            u, s, _ = np.linalg.svd(Y, full_matrices=False)
            keep = s > 1e-9 * max(1.0, np.sqrt(size))
            if np.any(keep):
                blocks.append((q, u[:, keep]))
                basis = np.hstack([basis, u[:, keep]])
            if basis.shape[1] >= size:
                return blocks
        # whatever the harmonics up to max_degree leave unresolved is put one degree above it
        rest = np.eye(size, dtype=complex) - basis @ basis.conj().T
        u, s, _ = np.linalg.svd(rest)
        blocks.append((self.max_degree + 1, u[:, s > 0.5]))
        return blocks


def spherical_project(f: SpectralField, l: int) -> SpectralField:
    """S_l f = Σ_q φ_l(q) (degree-q part of f) on every lattice shell."""
    lowest = 0 if l == 0 else int(np.ceil(PLATEAU * 2.0 ** (l - 1)))
    bases = ShellBases(resolution=f.resolution)
    if lowest > bases.top_degree:
        raise BandLimitError(f"band l={l} starts at degree {lowest}, beyond the lattice angular "
                             f"resolution (degree {bases.top_degree})", l=l)
    flat = f.values.ravel()
    out = np.zeros_like(flat)
    for members, blocks in bases.shells:
        chunk = flat[members]
        acc = np.zeros_like(chunk)
        for q, U in blocks:
            w = float(degree_weight(l, q))
            if w != 0.0:
                acc += w * (U @ (U.conj().T @ chunk))
        out[members] = acc
    return f.with_values(out.reshape(f.values.shape))


def zonal_kernel(l: int, cosangle) -> np.ndarray:
    """K_l(t) = Σ_q φ(2^{-l} q) (2q+1)/(4π) P_q(t)."""
    if l < 0:
        raise DomainError(f"l must be >= 0, got {l}", l=l)
    t = np.asarray(cosangle, dtype=float)
    degrees = np.arange(band_limit(l) + 1)
    weights = bump(degrees / 2.0 ** l) * (2 * degrees + 1) / (4 * np.pi)
    values = sum(w * special.eval_legendre(q, t) for q, w in zip(degrees, weights) if w != 0)
    return float(values) if np.ndim(values) == 0 else values


def band_kernel(l: int, cosangle) -> np.ndarray:
    """Reproducing kernel of S_l on the sphere."""
    return zonal_kernel(l, cosangle) - (zonal_kernel(l - 1, cosangle) if l > 0 else 0.0)


class SphereQuadrature(metaclass=KeyedSingleton):
    """Gauss–Legendre in cos θ times uniform azimuth; exact for degree ≤ 2·degree+1."""
    singleton_key = "degree"

    def __init__(self, degree: int = None):
        self.degree = degree
        t, w = special.roots_legendre(degree + 1)
        phi = np.arange(2 * degree + 2) * np.pi / (degree + 1)
        self.cos_polar = np.repeat(t, len(phi))
        self.azimuth = np.tile(phi, len(t))
        self.weights = np.repeat(w, len(phi)) * (np.pi / (degree + 1))

    def directions(self) -> np.ndarray:
        s = np.sqrt(1 - self.cos_polar ** 2)
        return np.stack([s * np.cos(self.azimuth), s * np.sin(self.azimuth), self.cos_polar], axis=1)

    def integrate(self, values: np.ndarray) -> complex:
        return np.sum(self.weights * values)


def kernel_sphere_integral(l: int) -> float:
    quad = SphereQuadrature(degree=band_limit(l) + 1)
    return float(np.real(quad.integrate(zonal_kernel(l, quad.cos_polar))))


def kernel_operator_norm(l: int, band: bool = True, panels: int = None) -> float:
    """L^∞ → L^∞ norm on the sphere: 2π ∫_{-1}^{1} |K(t)| dt."""
    kernel = band_kernel if band else zonal_kernel
    panels = panels or 8 * (band_limit(l) + 2)
    nodes, weights = special.roots_legendre(16)
    edges = np.linspace(-1.0, 1.0, panels + 1)
    mid, half = (edges[1:] + edges[:-1]) / 2, (edges[1:] - edges[:-1]) / 2
    t = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    return float(2 * np.pi * np.sum(w * np.abs(kernel(l, t))))


def zonal_bound_constant(levels, angles) -> Dict[str, float]:
    """Best C with |K_l(θ)| ≤ C·min(2^{2l}, 2^{-l}θ^{-3}) over the sampled grid."""
    worst, where = 0.0, None
    for l in levels:
        theta = np.asarray(angles, dtype=float)
        envelope = np.minimum(2.0 ** (2 * l), 2.0 ** (-l) * theta ** (-3.0))
        ratio = np.abs(zonal_kernel(l, np.cos(theta))) / envelope
        i = int(np.argmax(ratio))
        if ratio[i] > worst:
            worst, where = float(ratio[i]), (int(l), float(theta[i]))
    return {"C": worst, "worst_l": where[0] if where else None, "worst_angle": where[1] if where else None}
