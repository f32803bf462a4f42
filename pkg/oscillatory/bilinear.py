from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from scipy import fft as sfft
from scipy import special
from scipy.interpolate import RegularGridInterpolator

from config import defaults, workers
from dyadic.core import phi_shell, SUPPORT
from models.field import SpectralField
from models.system import SystemParams, PhaseTriple
from oscillatory.core import CELL_PHASE
from phases.core import eval_phase
from tools.errors import CostError, DomainError

Sampler = Callable[[np.ndarray], np.ndarray]


def _composite(lo, hi, panels: int, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes/weights on [lo, hi]; lo, hi may be arrays (one interval per row)."""
    nodes, weights = special.roots_legendre(order)
    lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
    t = (np.arange(panels)[:, None] + (nodes[None, :] + 1) / 2).ravel() / panels
    w = np.tile(weights / 2, panels) / panels
    span = (hi - lo)[..., None]
    return lo[..., None] + span * t, span * w


def _breakpoints(lam: float, support_F, support_G) -> np.ndarray:
    g_lo, g_hi = support_G
    f_lo, f_hi = support_F
    points = [f_lo, f_hi, lam + g_lo, lam - g_lo, lam + g_hi, lam - g_hi, g_lo - lam, g_hi - lam]
    return np.unique([p for p in points if f_lo <= p <= f_hi])


def radial_bilinear(F: Callable, G: Callable, xi_mag: float, support_F: Sequence[float],
                    support_G: Sequence[float], kernel: Callable = None, panels: int = 48,
                    order: int = 16) -> complex:
    """∫ F(|ξ−η|) G(|η|) K dη at |ξ| = λ, as (2π/λ)∫∫ ρτ F(ρ) G(τ) K(ρ,τ,λ) dρ dτ over |ρ−τ| ≤ λ ≤ ρ+τ."""
    lam = float(xi_mag)
    if not lam > 0:
        raise DomainError(f"output magnitude must be positive, got {lam}", xi_mag=lam)
    g_lo, g_hi = map(float, support_G)
    edges = _breakpoints(lam, support_F, support_G)
    total = 0j
    span = edges[-1] - edges[0]
    for a, b in zip(edges[:-1], edges[1:]):
        count = max(2, int(np.ceil(panels * (b - a) / span)))
        rho, w_rho = _composite(a, b, count, order)
        t_lo = np.maximum(np.abs(lam - rho), g_lo)
        t_hi = np.minimum(lam + rho, g_hi)
        live = t_hi > t_lo
        if not live.any():
            continue
        rho, w_rho, t_lo, t_hi = rho[live], w_rho[live], t_lo[live], t_hi[live]
        tau, w_tau = _composite(t_lo, t_hi, max(2, panels // 4), order)
        R = rho[:, None]
        values = R * tau * F(R) * G(tau)
        if kernel is not None:
            values = values * kernel(R, tau, lam)
        total += np.sum(w_rho * np.sum(w_tau * values, axis=1))
    return complex(2 * np.pi / lam * total)


def fourier_sampler(f: SpectralField, pad: int = 2) -> Sampler:
    """ζ -> f̂(ζ) (continuous transform) by linear interpolation on a zero-extended box."""
    n = f.resolution
    size = n * pad
    samples = np.zeros((size,) * 3, dtype=complex)
    start = (size - n) // 2
    samples[start:start + n, start:start + n, start:start + n] = np.asarray(sfft.ifftn(f.values, workers=workers))
    dx = f.spacing
    values = sfft.fftn(samples, workers=workers)
    q = np.fft.fftfreq(size) * size
    sign = (-1.0) ** q
    values = dx ** 3 * values * sign[:, None, None] * sign[None, :, None] * sign[None, None, :]
    axis = np.fft.fftshift(q) * 2 * np.pi / (size * dx)
    values = np.fft.fftshift(values)
    parts = [RegularGridInterpolator((axis, axis, axis), part, bounds_error=False, fill_value=0.0)
             for part in (values.real, values.imag)]

    def sample(zeta):
        points = np.asarray(zeta, dtype=float).reshape(-1, 3)
        return (parts[0](points) + 1j * parts[1](points)).reshape(np.shape(zeta)[:-1])
    return sample


def _frame(xi: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    e1 = xi / np.linalg.norm(xi)
    helper = np.array([1.0, 0.0, 0.0]) if abs(e1[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e2 = helper - (helper @ e1) * e1
    e2 /= np.linalg.norm(e2)
    return e1, e2, np.cross(e1, e2)


def _radial_extent(f: SpectralField, rel: float = 1e-10) -> Tuple[float, float]:
    mag = f.xi_mag()
    live = np.abs(f.values) > rel * np.max(np.abs(f.values))
    if not live.any():
        return 0.0, 0.0
    return float(np.min(mag[live])), float(np.max(mag[live]))


def _band_is_empty(f: SpectralField, xi: np.ndarray, upsilon: float) -> bool:
    """No lattice point carrying f has its angle to ξ inside the ψ₂ band."""
    kx, ky, kz = f.wavenumbers()
    eta = np.stack(np.broadcast_arrays(kx, ky, kz), axis=-1)
    live = np.abs(f.values) > 1e-10 * np.max(np.abs(f.values))
    eta = eta[live]
    norms = np.linalg.norm(eta, axis=1)
    eta, norms = eta[norms > 0], norms[norms > 0]
    sin = np.linalg.norm(np.cross(eta, xi / np.linalg.norm(xi)), axis=1) / norms
    return not np.any(phi_shell(0, 2.0 ** upsilon * sin) > 0)


def bound_hypotheses(m: int, k: int, k1: int, k2: int, l1: int, l2: int, j1: int, upsilon: float,
                     kappa: float) -> List[str]:
    """Violated localization hypotheses of the angular restriction estimate (plain inequalities)."""
    warnings = []
    K0 = defaults["K0"]
    kbar, lbar = max(0, k1, k2), max(l1, l2)
    if max(k1, k2) < -2 * K0 ** 2:
        warnings.append(f"max(k1,k2)={max(k1, k2)} < -2K0^2")
    if not kappa < m:
        warnings.append(f"kappa={kappa} is not below m={m}")
    if not lbar < m / 10:
        warnings.append(f"max(l1,l2)={lbar} is not below m/10={m / 10:g}")
    if not j1 - k1 < m:
        warnings.append(f"j1-k1={j1 - k1} is not below m={m}")
    if abs(k1 - k2) <= 6:
        if not upsilon < (m + k) / 2 - kbar:
            warnings.append(f"upsilon={upsilon} is not below (m+k)/2-kbar={(m + k) / 2 - kbar:g}")
        if not m + k > 2 * lbar:
            warnings.append(f"m+k={m + k} is not above 2*lbar={2 * lbar}")
    elif abs(k - k1) <= 6:
        if not upsilon < (m + k2) / 2 - kbar:
            warnings.append(f"upsilon={upsilon} is not below (m+k2)/2-kbar={(m + k2) / 2 - kbar:g}")
        if not m + k2 > 2 * lbar:
            warnings.append(f"m+k2={m + k2} is not above 2*lbar={2 * lbar}")
    elif abs(k - k2) <= 6:
        if not abs(k1) < (m - lbar) / 2 or not upsilon < (m - lbar) / 2:
            warnings.append(f"|k1|={abs(k1)} or upsilon={upsilon} is not below (m-lbar)/2={(m - lbar) / 2:g}")
    else:
        warnings.append(f"no frequency case applies to (k,k1,k2)=({k},{k1},{k2})")
    return warnings


def angular_bilinear(params: SystemParams, triple: PhaseTriple, F: Union[SpectralField, Sampler],
                     G: Union[SpectralField, Sampler], upsilon: float, kappa: float, t: float,
                     xi: Sequence[float], k: int = None, rho_range: Sequence[float] = None,
                     multiplier: Callable = None, psi1: Callable = None, n_phi: int = 48,
                     order: int = 8, hypotheses: Dict[str, int] = None, max_nodes: int = None) -> Dict:
    """I' at one output frequency ξ, beside the integral without the ψ₂ angular cutoff.

    η is parametrized by ρ = |η|, the angle θ between η and ξ, and an azimuth φ
    about ξ. The ψ₂ factor is φ₀(2^υ sin θ), which confines θ to two intervals.
    """
    triple.check(params.d)
    xi = np.asarray(xi, dtype=float)
    xi_mag = float(np.linalg.norm(xi))
    if not xi_mag > 0:
        raise DomainError("output frequency must be nonzero", xi=xi.tolist())
    max_nodes = defaults["max_cells"] if max_nodes is None else max_nodes
    warnings = bound_hypotheses(upsilon=upsilon, kappa=kappa, **hypotheses) if hypotheses else []
    for w in warnings:
        logger.warning(f"angular_bilinear hypothesis not met: {w}")

    lattice_G = G if isinstance(G, SpectralField) else None
    if rho_range is None:
        if lattice_G is None:
            raise DomainError("rho_range is required when G is a sampler")
        rho_range = _radial_extent(lattice_G)
    F = fourier_sampler(F) if isinstance(F, SpectralField) else F
    G = fourier_sampler(G) if isinstance(G, SpectralField) else G
    psi1 = psi1 or (lambda z: np.exp(-z * z))
    k = int(np.round(np.log2(xi_mag))) if k is None else k
    result = {"xi": xi.tolist(), "t": float(t), "upsilon": float(upsilon), "kappa": float(kappa), "k": k,
              "hypothesis_warnings": warnings}

    s_lo, s_hi = 5 / 8 * 2.0 ** -upsilon, min(1.0, SUPPORT * 2.0 ** -upsilon)
    empty = s_lo >= 1.0 or (lattice_G is not None and _band_is_empty(lattice_G, xi, upsilon))

    e1, e2, e3 = _frame(xi)
    rho_lo, rho_hi = map(float, rho_range)
    speed = params.speed(triple.mu) + params.speed(triple.nu)
    rho_panels = max(4, int(np.ceil(abs(t) * speed * (rho_hi - rho_lo) / CELL_PHASE)))
    rho, w_rho = _composite(rho_lo, rho_hi, rho_panels, order)

    def integrate(intervals, restricted: bool) -> complex:
        total = 0j
        for a, b in intervals:
            theta_panels = max(4, int(np.ceil(abs(t) * params.speed(triple.mu) * xi_mag * rho_hi * (b - a)
                                              / CELL_PHASE)))
            nodes = len(rho) * theta_panels * order * n_phi
            if nodes > max_nodes:
                raise CostError(f"angular quadrature needs {nodes} nodes, budget is {max_nodes}",
                                suggested_max_K=abs(t) * np.sqrt(max_nodes / nodes), nodes=nodes)
            theta, w_theta = _composite(a, b, theta_panels, order)
            phi = np.arange(n_phi) * 2 * np.pi / n_phi
            sin_t, cos_t = np.sin(theta), np.cos(theta)
            for r, wr in zip(rho, w_rho):
                direction = (cos_t[:, None, None] * e1
                             + sin_t[:, None, None] * (np.cos(phi)[None, :, None] * e2
                                                       + np.sin(phi)[None, :, None] * e3))
                eta = r * direction
                phase = eval_phase(params, triple, xi, eta)
                values = np.exp(1j * t * phase) * psi1(2.0 ** kappa * phase) * F(xi - eta) * G(eta)
                if multiplier is not None:
                    values = values * multiplier(xi, eta)
                if restricted:
                    values = values * phi_shell(0, 2.0 ** upsilon * sin_t)[:, None]
                total += wr * r * r * np.sum(w_theta[:, None] * sin_t[:, None] * values) * (2 * np.pi / n_phi)
        return complex(total * phi_shell(k, xi_mag))

    full = integrate([(0.0, np.pi)], False)
    if empty:
        value = 0j
    else:
        a, b = np.arcsin(s_lo), np.arcsin(s_hi)
        value = integrate([(a, b), (np.pi - b, np.pi - a)], True)
    result.update({"value": {"re": value.real, "im": value.imag}, "abs_value": abs(value),
                   "unrestricted": {"re": full.real, "im": full.imag}, "abs_unrestricted": abs(full),
                   "ratio": abs(value) / abs(full) if abs(full) > 0 else None, "empty_band": bool(empty),
                   "rho_range": [rho_lo, rho_hi], "rho_nodes": int(len(rho))})
    return result
