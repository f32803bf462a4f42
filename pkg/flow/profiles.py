"""Separable Fourier profiles g(|ξ|)·Y_q^m(ξ/|ξ|) evolved by the radial reduction.

For such data e^{itΛ} acts on g alone and the physical field is

    u(r, x̂) = 4π i^q (2π)^{-3} Y_q^m(x̂) ∫ j_q(rρ) e^{itΛ(ρ)} g(ρ) ρ² dρ,

so large times need only a one-dimensional oscillatory integral per radius.
"""
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import special

from dyadic.core import phi_shell, SUPPORT, PLATEAU
from models.field import SpectralField
from models.system import SystemParams
from oscillatory.core import CELL_PHASE
from tools.errors import DomainError


@dataclass
class AngularProfile:
    radial: Callable[[np.ndarray], np.ndarray]
    rho_range: Tuple[float, float]
    q: int = 0
    m: int = 0
    label: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.q < 0 or abs(self.m) > self.q:
            raise DomainError(f"need 0 <= |m| <= q, got q={self.q}, m={self.m}", q=self.q, m=self.m)

    def _nodes(self, rate: float, order: int = 16):
        lo, hi = self.rho_range
        panels = max(8, int(np.ceil(rate * (hi - lo) / CELL_PHASE)))
        x, w = special.roots_legendre(order)
        edges = np.linspace(lo, hi, panels + 1)
        mid, half = (edges[1:] + edges[:-1]) / 2, (edges[1:] - edges[:-1]) / 2
        return (mid[:, None] + half[:, None] * x).ravel(), (half[:, None] * w).ravel()

    def l2_norm(self) -> float:
        rho, w = self._nodes(0.0)
        return float(np.sqrt(np.sum(w * np.abs(self.radial(rho)) ** 2 * rho ** 2) / (2 * np.pi) ** 3))

    def normalized(self) -> "AngularProfile":
        scale = 1.0 / self.l2_norm()
        radial = self.radial
        return AngularProfile(lambda rho: scale * radial(rho), self.rho_range, self.q, self.m, self.label,
                              dict(self.meta))

    def angular_peak(self) -> float:
        """max over the sphere of |Y_q^m|."""
        polar = np.linspace(0.0, np.pi, 2049)
        return float(np.max(np.abs(special.sph_harm_y(self.q, self.m, polar, 0.0))))

    def radial_values(self, params: SystemParams, sigma: int, t: float, r: np.ndarray) -> np.ndarray:
        """u(r, x̂)/Y_q^m(x̂) at time t for the radii r."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        c = params.speed(sigma)
        rate = abs(t) * c + float(np.max(r)) + self.meta.get("phase_rate", 0.0)
        rho, w = self._nodes(rate)
        weights = w * np.exp(1j * t * params.dispersion(sigma, rho)) * self.radial(rho) * rho ** 2
        out = np.empty(r.shape, dtype=complex)
        # blocks of radii keep the j_q table small
        for start in range(0, len(r), 256):
            block = r[start:start + 256]
            out[start:start + 256] = special.spherical_jn(self.q, block[:, None] * rho[None, :]) @ weights
        return 4 * np.pi * (1j ** self.q) / (2 * np.pi) ** 3 * out

    def radius_window(self, params: SystemParams, sigma: int, t: float, margin: float = None) -> Tuple[float, float]:
        """Radii reached by the group velocities of the carried frequencies, widened by ``margin``."""
        lo, hi = self.rho_range
        c, b = params.speed(sigma), params.mass(sigma)
        velocity = lambda rho: c * c * rho / np.sqrt(c * c * rho * rho + b * b)
        margin = self.meta.get("radius", 0.0) + 20.0 / (hi - lo) if margin is None else margin
        return max(0.0, abs(t) * velocity(lo) - margin), abs(t) * velocity(hi) + margin

    def sup_norm(self, params: SystemParams, sigma: int, t: float, samples_per_unit: float = None) -> float:
        r_lo, r_hi = self.radius_window(params, sigma, t)
        density = samples_per_unit or 4 * self.rho_range[1] / np.pi
        r = np.linspace(r_lo, r_hi, max(64, int(np.ceil((r_hi - r_lo) * density))))
        return float(np.max(np.abs(self.radial_values(params, sigma, t, r))) * self.angular_peak())

    def to_field(self, resolution: int, box_length: float) -> SpectralField:
        """Lattice sampling of the continuous transform (values = f̂/dx³ with the centred-grid sign)."""
        f = SpectralField.zeros(resolution, box_length)
        kx, ky, kz = f.wavenumbers()
        rho = np.sqrt(kx ** 2 + ky ** 2 + kz ** 2)
        polar = np.arccos(np.clip(np.divide(kz, rho, out=np.ones_like(rho), where=rho > 0), -1, 1))
        azimuth = np.arctan2(ky + 0 * kx, kx + 0 * ky)
        lo, hi = self.rho_range
        inside = (rho >= lo) & (rho <= hi)
        g = np.where(inside, self.radial(np.clip(rho, lo, hi)), 0.0)
        values = g * special.sph_harm_y(self.q, self.m, polar, azimuth)
        q = np.fft.fftfreq(resolution) * resolution
        sign = (-1.0) ** q
        values = values * sign[:, None, None] * sign[None, :, None] * sign[None, None, :] / f.spacing ** 3
        return f.with_values(values, tag="complex")


def shell_profile(j: int, k: int, q: int = 0, m: int = 0, outgoing: bool = False) -> AngularProfile:
    """Unit-mass profile at frequency 2^k, spread over |x| ~ 2^j: g(ρ) = φ₀(ρ/2^k) e^{∓iρ2^j}.

    The default sign focuses under e^{itΛ}, Λ > 0, before spreading; ``outgoing`` flips it.
    """
    if j < 0:
        raise DomainError(f"j must be >= 0, got {j}", j=j)
    scale, radius = 2.0 ** k, 2.0 ** j
    turn = 1.0 if outgoing else -1.0
    radial = lambda rho: phi_shell(0, np.asarray(rho) / scale) * np.exp(turn * 1j * np.asarray(rho) * radius)
    profile = AngularProfile(radial, (PLATEAU / 2 * scale, SUPPORT * scale), q, m, label=f"shell(j={j},k={k},q={q})",
                             meta={"j": j, "k": k, "outgoing": outgoing, "radius": radius, "phase_rate": radius})
    return profile.normalized()


def gaussian_profile(width: float = 1.0, cutoff: float = 10.0) -> AngularProfile:
    """Radial Gaussian exp(-|x|²/2w²) through its transform (2π)^{3/2} w³ exp(-w²ρ²/2), unit mass."""
    radial = lambda rho: (2 * np.pi) ** 1.5 * width ** 3 * np.exp(-(width * np.asarray(rho)) ** 2 / 2)
    return AngularProfile(radial, (0.0, cutoff / width), 0, 0, label=f"gaussian(w={width})",
                          meta={"width": width, "radius": 4 * width}).normalized()
