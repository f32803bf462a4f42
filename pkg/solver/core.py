"""First-order diagonalization and the profile equation.

With v_σ = (∂_t − iΛ_σ)u_{|σ|} and f_σ = e^{itΛ_σ}v_σ the system becomes

    ∂_t f̂_σ(t, ξ) = e^{itΛ_σ(ξ)} Q̂_{|σ|}(t, ξ),

where Q is the quadratic nonlinearity evaluated on u and ∂_t u recovered from
the profiles. Products are taken on the physical grid after 2/3 truncation.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy import fft as sfft

from config import workers
from flow.core import derivative_symbols
from models.field import SpectralField, COMPLEX, PHYSICAL_REAL, reflect
from models.system import SystemParams, PhaseTriple
from tools.errors import AliasingError, DomainError


@dataclass(frozen=True, eq=False)
class ProfileState:
    t: float
    fhat: Dict[int, SpectralField]
    meta: dict = field(default_factory=dict)

    @property
    def reference(self) -> SpectralField:
        return next(iter(self.fhat.values()))

    def norm(self) -> float:
        """sqrt of Σ_σ ‖f_σ‖₂²."""
        return float(np.sqrt(sum(f.l2_norm() ** 2 for f in self.fhat.values())))

    def distance(self, other: "ProfileState") -> float:
        return float(np.sqrt(sum((self.fhat[s] - other.fhat[s]).l2_norm() ** 2 for s in self.fhat)))

    def conjugation_drift(self) -> float:
        """max over α of |f̂_{−α}(ξ) − conj f̂_α(−ξ)|, relative to the largest coefficient."""
        scale = max(float(np.max(np.abs(f.values))) for f in self.fhat.values()) or 1.0
        drift = 0.0
        for s in self.fhat:
            if s > 0:
                gap = self.fhat[-s].values - np.conj(reflect(self.fhat[s].values))
                drift = max(drift, float(np.max(np.abs(gap))))
        return drift / scale

    def projected(self) -> "ProfileState":
        """Average each pair onto the conjugation-symmetric subspace."""
        out = {}
        for s in sorted(self.fhat, reverse=True):
            if s > 0:
                sym = (self.fhat[s].values + np.conj(reflect(self.fhat[-s].values))) / 2
                out[s] = self.fhat[s].with_values(sym)
                out[-s] = self.fhat[-s].with_values(np.conj(reflect(sym)))
        return ProfileState(self.t, {s: out[s] for s in self.fhat}, dict(self.meta))

    def arrays(self) -> Dict[int, np.ndarray]:
        return {s: f.values for s, f in self.fhat.items()}

    def with_arrays(self, t: float, values: Dict[int, np.ndarray]) -> "ProfileState":
        return ProfileState(t, {s: self.fhat[s].with_values(values[s], tag=COMPLEX) for s in self.fhat},
                            dict(self.meta))


def _dispersion_grid(params: SystemParams, s: int, f: SpectralField) -> np.ndarray:
    return params.dispersion(s, f.xi_mag())


def diagonalize(g: Sequence[SpectralField], h: Sequence[SpectralField], params: SystemParams) -> ProfileState:
    """v_α = h_α − iΛ_α g_α for every signed index, which is the profile at t = 0."""
    if len(g) != params.d or len(h) != params.d:
        raise DomainError(f"need {params.d} components of u(0) and ∂_t u(0), got {len(g)} and {len(h)}")
    fhat = {}
    for s in params.indices:
        a = abs(s) - 1
        lam = _dispersion_grid(params, s, g[a])
        fhat[s] = g[a].with_values(h[a].values - 1j * lam * g[a].values, tag=COMPLEX, component=s)
    return ProfileState(0.0, {s: fhat[s] for s in sorted(fhat, key=lambda x: (abs(x), -x))})


def velocities(state: ProfileState, params: SystemParams, t: float = None) -> Dict[int, np.ndarray]:
    """v̂_σ = e^{−itΛ_σ} f̂_σ."""
    t = state.t if t is None else t
    out = {}
    for s, f in state.fhat.items():
        out[s] = f.values if t == 0 else f.values * np.exp(-1j * t * _dispersion_grid(params, s, f))
    return out


def invert(state: ProfileState, params: SystemParams) -> Tuple[List[SpectralField], List[SpectralField]]:
    """(u, ∂_t u) from ∂_t u_α = (v_α + v_{−α})/2 and u_α = (i/2)Λ_α^{-1}(v_α − v_{−α})."""
    v = velocities(state, params)
    u, du = [], []
    for a in range(1, params.d + 1):
        f = state.fhat[a]
        lam = _dispersion_grid(params, a, f)
        u.append(f.with_values(0.5j * (v[a] - v[-a]) / lam, tag=PHYSICAL_REAL, component=a))
        du.append(f.with_values(0.5 * (v[a] + v[-a]), tag=PHYSICAL_REAL, component=a))
    return u, du


def dealias_mask(n: int) -> np.ndarray:
    """Lattice modes kept by the 2/3 rule: |q_i| ≤ n/3 on every axis."""
    q = np.abs(np.fft.fftfreq(n) * n)
    keep = q <= n / 3
    return keep[:, None, None] & keep[None, :, None] & keep[None, None, :]


def dealias(f: SpectralField) -> SpectralField:
    return f.with_values(f.values * dealias_mask(f.resolution))


def check_dealiased(state: ProfileState, rel: float = 1e-12):
    mask = dealias_mask(state.reference.resolution)
    for s, f in state.fhat.items():
        peak = float(np.max(np.abs(f.values)))
        outside = float(np.max(np.abs(f.values[~mask]), initial=0.0))
        if outside > rel * max(peak, 1e-300):
            raise AliasingError(f"profile {s} carries {outside:.3g} beyond the 2/3 band; zero-pad or dealias the data",
                                sigma=s, outside=outside)


def _slot_symbol(params: SystemParams, s: int, zeta: np.ndarray, slot: int):
    """Fourier symbol taking v̂_s to the slot (u, ∂_1u, ∂_2u, ∂_3u, ∂_tu) of component |s|."""
    zeta = np.asarray(zeta, dtype=float)
    lam = params.dispersion(s, np.linalg.norm(zeta, axis=-1))
    if slot == 0:
        return 0.5j / lam
    if slot <= 3:
        return -zeta[..., slot - 1] / (2 * lam)
    return 0.5 + 0 * lam


def _hessian_symbol(params: SystemParams, s: int, zeta: np.ndarray, j: int, k: int):
    zeta = np.asarray(zeta, dtype=float)
    lam = params.dispersion(s, np.linalg.norm(zeta, axis=-1))
    return -zeta[..., j] * zeta[..., k] * 0.5j / lam


def multiplier_m(params: SystemParams, triple: PhaseTriple, xi, eta):
    """Symbol m_{σμν}(ξ, η) of the quadratic term: v̂_μ(ξ−η) v̂_ν(η) ↦ Q̂_{|σ|}(ξ).

    The first factor of every product (the second derivative for the
    quasilinear terms) comes from μ and the second from ν.
    """
    triple.check(params.d)
    xi, eta = np.asarray(xi, dtype=float), np.asarray(eta, dtype=float)
    z1, z2 = xi - eta, eta
    a, b, g = abs(triple.sigma) - 1, abs(triple.mu) - 1, abs(triple.nu) - 1
    m = np.zeros(np.broadcast(z1[..., 0], z2[..., 0]).shape, dtype=complex)
    for p, q in zip(*np.nonzero(params.Qprime[a, b, g])):
        m = m + params.Qprime[a, b, g, p, q] * _slot_symbol(params, triple.mu, z1, p) \
            * _slot_symbol(params, triple.nu, z2, q)
    for j, k in zip(*np.nonzero(params.A[a, b, g])):
        m = m + params.A[a, b, g, j, k] * _hessian_symbol(params, triple.mu, z1, j, k) \
            * _slot_symbol(params, triple.nu, z2, 0)
    for j, k, l in zip(*np.nonzero(params.B[a, b, g])):
        m = m + params.B[a, b, g, j, k, l] * _hessian_symbol(params, triple.mu, z1, j, k) \
            * _slot_symbol(params, triple.nu, z2, l + 1)
    return complex(m) if m.ndim == 0 else m


def multiplier_envelope(params: SystemParams, triple: PhaseTriple, ks: Sequence[int], samples: int = 200,
                        seed: int = 0) -> Dict[str, float]:
    """max over sampled shells of |m| / (1 + 2^{max(k,k1,k2)})."""
    rng = np.random.default_rng(seed)
    ratios = {}
    for k1 in ks:
        for k2 in ks:
            d1 = rng.normal(size=(samples, 3))
            d2 = rng.normal(size=(samples, 3))
            z1 = d1 / np.linalg.norm(d1, axis=1, keepdims=True) * 2.0 ** k1 * rng.uniform(0.7, 1.5, (samples, 1))
            z2 = d2 / np.linalg.norm(d2, axis=1, keepdims=True) * 2.0 ** k2 * rng.uniform(0.7, 1.5, (samples, 1))
            xi = z1 + z2
            top = np.maximum(np.maximum(np.linalg.norm(z1, axis=1), np.linalg.norm(z2, axis=1)),
                             np.linalg.norm(xi, axis=1))
            ratios[f"{k1},{k2}"] = float(np.max(np.abs(multiplier_m(params, triple, xi, z2)) / (1 + top)))
    return {"max": max(ratios.values()) if ratios else 0.0, "shells": ratios}


def physical_slots(state: ProfileState, params: SystemParams, s: float = None):
    """Physical u, ∂_l u, ∂_t u (the semilinear slot order) and ∂_j∂_k u per component."""
    f0 = state.reference
    n = f0.resolution
    grads = derivative_symbols(n, f0.spacing)
    v = velocities(state, params, s)
    slots, hessians = [], []
    for a in range(1, params.d + 1):
        lam = _dispersion_grid(params, a, state.fhat[a])
        uhat = 0.5j * (v[a] - v[-a]) / lam
        dthat = 0.5 * (v[a] + v[-a])
        spectral = [uhat] + [g * uhat for g in grads] + [dthat]
        slots.append([sfft.ifftn(x, workers=workers) for x in spectral])
        hessians.append({(j, k): sfft.ifftn(grads[j] * grads[k] * uhat, workers=workers)
                         for j in range(3) for k in range(j, 3)})
    return slots, hessians


def nonlinearity(params: SystemParams, slots, hessians) -> List[np.ndarray]:
    """Q_α on the physical grid."""
    shape = slots[0][0].shape
    Q = [np.zeros(shape, dtype=complex) for _ in range(params.d)]
    for a, b, g, p, q in zip(*np.nonzero(params.Qprime)):
        Q[a] += params.Qprime[a, b, g, p, q] * slots[b][p] * slots[g][q]
    for a, b, g, j, k in zip(*np.nonzero(params.A)):
        Q[a] += params.A[a, b, g, j, k] * slots[g][0] * hessians[b][(min(j, k), max(j, k))]
    for a, b, g, j, k, l in zip(*np.nonzero(params.B)):
        Q[a] += params.B[a, b, g, j, k, l] * slots[g][l + 1] * hessians[b][(min(j, k), max(j, k))]
    return Q


def rhs_arrays(state: ProfileState, params: SystemParams, s: float) -> Dict[int, np.ndarray]:
    f0 = state.reference
    if params.is_free:
        return {sig: np.zeros_like(f.values) for sig, f in state.fhat.items()}
    mask = dealias_mask(f0.resolution)
    slots, hessians = physical_slots(state, params, s)
    Qhat = [sfft.fftn(q, workers=workers) * mask for q in nonlinearity(params, slots, hessians)]
    out = {}
    for sig, f in state.fhat.items():
        out[sig] = np.exp(1j * s * _dispersion_grid(params, sig, f)) * Qhat[abs(sig) - 1]
    return out


def duhamel_rhs(state: ProfileState, params: SystemParams, s: float = None) -> Dict[int, SpectralField]:
    """∂_t f̂_σ at time s for every σ."""
    s = state.t if s is None else s
    check_dealiased(state)
    values = rhs_arrays(state, params, s)
    logger.debug(f"Duhamel rhs at s={s:g}: max |∂f| = {max(np.max(np.abs(x)) for x in values.values()):.3g}")
    return {sig: state.fhat[sig].with_values(values[sig], tag=COMPLEX) for sig in state.fhat}
