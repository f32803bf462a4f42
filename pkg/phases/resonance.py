from typing import Dict, List, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy import optimize

from config import defaults
from models.reports import ResonancePoint, ResonanceReport
from models.system import SystemParams, PhaseTriple, is_mass_resonant
from phases.core import eval_phase, phase_derivatives, parallel_phase, parallel_phase_dalpha, parallel_jacobian, \
    collinear
from tools.errors import DomainError


def _newton(params, triple, alpha, beta, tol, max_iter=60):
    for _ in range(max_iter):
        F, J = parallel_jacobian(params, triple, alpha, beta)
        if np.max(np.abs(F)) <= tol:
            return alpha, beta, True
        try:
            step = np.linalg.solve(J, F)
        except np.linalg.LinAlgError:
            return alpha, beta, False
        if not np.all(np.isfinite(step)):
            return alpha, beta, False
        alpha, beta = alpha - step[0], beta - step[1]
    F, _ = parallel_jacobian(params, triple, alpha, beta)
    return alpha, beta, bool(np.max(np.abs(F)) <= tol)


def _annotate(params, triple, alpha, beta) -> ResonancePoint:
    phi, dphi, d2phi = parallel_phase(params, triple, alpha, beta, 2)
    xi, eta = collinear(alpha, beta)
    det = float(np.linalg.det(phase_derivatives(params, triple, xi, eta)["hess_eta"]))
    return ResonancePoint(alpha=float(alpha), beta=float(beta), phi_residual=float(abs(phi)),
                          dbeta_residual=float(abs(dphi)), d2beta=float(d2phi), hessian_det=det,
                          hessian_nondegenerate=bool(abs(det) > 1e-8))


def family_residuals(params: SystemParams, triple: PhaseTriple, rho: float, samples: int = 100,
                     radius: float = 10.0, seed: int = 0) -> Dict[str, float]:
    """max |Φ(ξ,ρξ)| and |∇_ηΦ(ξ,ρξ)| over random ξ with |ξ| ≤ radius."""
    rng = np.random.default_rng(seed)
    directions = rng.normal(size=(samples, 3))
    directions /= np.linalg.norm(directions, axis=1)[:, None]
    xi = directions * (radius * rng.random(samples) ** (1 / 3))[:, None]
    eta = rho * xi
    phi = eval_phase(params, triple, xi, eta)
    grad = phase_derivatives(params, triple, xi, eta)["grad_eta"]
    return {"max_phi": float(np.max(np.abs(phi))),
            "max_grad_eta": float(np.max(np.linalg.norm(grad, axis=1))),
            "samples": samples, "radius": radius}


def spacetime_resonances(params: SystemParams, triple: PhaseTriple,
                         search_box: Sequence[Sequence[float]] = ((-5, 5), (-5, 5)),
                         grid: int = 801, tol: float = None, dedup: float = None) -> ResonanceReport:
    triple.check(params.d)
    tol = defaults["newton_tol"] if tol is None else tol
    dedup = defaults["dedup_radius"] if dedup is None else dedup
    tolerances = {"newton_tol": tol, "dedup_radius": dedup, "condition_tol": defaults["condition_tol"]}
    s, m, n = triple.sigma, triple.mu, triple.nu
    if params.speed(s) == params.speed(m) == params.speed(n):
        if not is_mass_resonant(params, triple):
            return ResonanceReport(kind="empty", triple=triple.as_list(), tolerances=tolerances)
        rho = params.mass(n) / params.mass(s)
        return ResonanceReport(kind="sphere_family", triple=triple.as_list(), rho=rho,
                               family_residuals=family_residuals(params, triple, rho), tolerances=tolerances)

    (a0, a1), (b0, b1) = search_box
    alphas, betas = np.linspace(a0, a1, grid), np.linspace(b0, b1, grid)
    A, Bt = np.meshgrid(alphas, betas, indexing="ij")
    phi, dphi = parallel_phase(params, triple, A, Bt, 1)
    score = np.abs(phi) + np.abs(dphi)
    h = max(alphas[1] - alphas[0], betas[1] - betas[0])
    lipschitz = float(np.max(np.hypot(*np.gradient(score, h))))
    threshold = lipschitz * h

    padded = np.pad(score, 1, mode="constant", constant_values=np.inf)
    neighbours = np.stack([padded[1 + dx:grid + 1 + dx, 1 + dy:grid + 1 + dy]
                           for dx in (-1, 0, 1) for dy in (-1, 0, 1) if dx or dy])
    seeds = np.argwhere((score <= neighbours.min(axis=0)) & (score <= threshold))
    logger.debug(f"Triple {triple}: {len(seeds)} seeds below {threshold:.3g} on a {grid}² grid")

    found: List[ResonancePoint] = []
    unresolved: List[Tuple[float, float]] = []
    for i, j in seeds:
        alpha, beta, ok = _newton(params, triple, float(alphas[i]), float(betas[j]), tol)
        if not ok:
            logger.warning(f"Newton did not converge from seed ({alphas[i]:.6g}, {betas[j]:.6g}) for {triple}")
            unresolved.append((float(alphas[i]), float(betas[j])))
            continue
        if not (a0 - h <= alpha <= a1 + h and b0 - h <= beta <= b1 + h):
            continue
        if any(np.hypot(alpha - p.alpha, beta - p.beta) < dedup for p in found):
            continue
        found.append(_annotate(params, triple, alpha, beta))

    found.sort(key=lambda p: (p.alpha, p.beta))
    if not found:
        kind = "empty"
    elif all(abs(p.alpha) < dedup and abs(p.beta) < dedup for p in found):
        kind = "degenerate_origin"
    else:
        kind = "finite"
    return ResonanceReport(kind=kind, triple=triple.as_list(), pairs=found, unresolved=unresolved,
                           search_box=[list(map(float, search_box[0])), list(map(float, search_box[1]))],
                           grid=grid, tolerances=tolerances)


def sublevel_measure(params: SystemParams, triple: PhaseTriple, alpha: float, eps: float,
                     beta_window: Sequence[float], density: int = None, xtol: float = 1e-14) -> float:
    """|{β in window : |Φ⁺(α,β)| ≤ eps}|."""
    if not eps > 0:
        raise DomainError(f"eps must be positive, got {eps}", eps=eps)
    density = defaults["scan_density"] if density is None else density
    lo, hi = map(float, beta_window)
    samples = max(int(np.ceil((hi - lo) * density)), 16) + 1
    betas = np.linspace(lo, hi, samples)
    g = lambda b: np.abs(parallel_phase(params, triple, alpha, b, 0)[0]) - eps
    values = g(betas)
    breaks = [lo, hi]
    for i in np.nonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)[0]:
        breaks.append(optimize.brentq(g, betas[i], betas[i + 1], xtol=xtol))
    breaks = np.unique(breaks)
    mids = (breaks[1:] + breaks[:-1]) / 2
    inside = g(mids) <= 0
    return float(np.sum((breaks[1:] - breaks[:-1])[inside]))


def derivative_lower_bound(params: SystemParams, triple: PhaseTriple, box: Sequence[Sequence[float]],
                           samples: int = 201, max_order: int = 3, variable: str = "beta",
                           restrict_below: float = None) -> Dict[str, float]:
    """min over the box of max_{μ ≤ max_order} |∂^μ Φ⁺|.

    ``restrict_below`` keeps only points where min(|α|, |β|, |α-β|) ≤ restrict_below,
    the low-frequency regime in which orders up to 2 already suffice.
    """
    (a0, a1), (b0, b1) = box
    A, Bt = np.meshgrid(np.linspace(a0, a1, samples), np.linspace(b0, b1, samples), indexing="ij")
    derivs = parallel_phase if variable == "beta" else parallel_phase_dalpha
    values = np.max(np.abs(np.stack(derivs(params, triple, A, Bt, max_order))), axis=0)
    if restrict_below is not None:
        mask = np.minimum(np.minimum(np.abs(A), np.abs(Bt)), np.abs(A - Bt)) <= restrict_below
        if not np.any(mask):
            return {"constant": None, "alpha": None, "beta": None, "max_order": max_order, "variable": variable}
        values = np.where(mask, values, np.inf)
    i = np.unravel_index(int(np.argmin(values)), values.shape)
    return {"constant": float(values[i]), "alpha": float(A[i]), "beta": float(Bt[i]),
            "max_order": max_order, "variable": variable, "samples": samples}


def _shell_vectors(rng, count, k):
    directions = rng.normal(size=(count, 3))
    directions /= np.linalg.norm(directions, axis=1)[:, None]
    return directions * (2.0 ** k * (1 + rng.random(count)))[:, None]


def regime_lower_bound(params: SystemParams, triple: PhaseTriple, k: int, k1: int, k2: int = None,
                       samples: int = 20000, seed: int = 0) -> Dict[str, float]:
    """Empirical C in |Φ| + |∇_ηΦ| ≥ C·2^{-p·k1} over random shell samples.

    p = 2 when k ≥ k1 + D₀ (output frequency dominates), p = 4 in the comparable
    regime |k1 - k2| ≤ 2D₀. ξ ∼ 2^k and ξ-η ∼ 2^{k1}; η follows.
    """
    D0 = defaults["D0"]
    rng = np.random.default_rng(seed)
    xi = _shell_vectors(rng, samples, k)
    eta = xi - _shell_vectors(rng, samples, k1)
    if k2 is not None:
        keep = np.abs(np.log2(np.linalg.norm(eta, axis=1)) - k2) <= 1
        xi, eta = xi[keep], eta[keep]
    if k >= k1 + D0:
        power, regime = 2, "high_output"
    else:
        power, regime = 4, "comparable"
    size = np.abs(eval_phase(params, triple, xi, eta)) \
        + np.linalg.norm(phase_derivatives(params, triple, xi, eta)["grad_eta"], axis=1)
    if not len(size):
        return {"C": None, "regime": regime, "samples": 0}
    return {"C": float(np.min(size) * 2.0 ** (power * k1)), "regime": regime, "power": power,
            "samples": int(len(size)), "k": k, "k1": k1, "mass_resonant": is_mass_resonant(params, triple)}


def family_gradient_ratio(params: SystemParams, triple: PhaseTriple, k: int, samples: int = 2000,
                          seed: int = 0) -> Dict[str, float]:
    """Range of |∇_ηΦ| / (2^{-3k}|η-ρξ|) for η = (ρ+t)ξ near a resonance sphere, |ξ| ∼ 2^k."""
    rho = params.mass(triple.nu) / params.mass(triple.sigma)
    rng = np.random.default_rng(seed)
    xi = _shell_vectors(rng, samples, k)
    t = (rng.random(samples) * 2 - 1) * 2.0 ** -4 * min(abs(rho), abs(1 - rho))
    t = np.where(np.abs(t) < 1e-6, 1e-6, t)
    eta = (rho + t)[:, None] * xi
    grad = np.linalg.norm(phase_derivatives(params, triple, xi, eta)["grad_eta"], axis=1)
    ratio = grad / (2.0 ** (-3 * k) * np.linalg.norm(eta - rho * xi, axis=1))
    return {"min": float(np.min(ratio)), "max": float(np.max(ratio)), "k": k, "rho": rho}
