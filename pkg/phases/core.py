from typing import Dict, List

import numpy as np

from models.system import SystemParams, PhaseTriple


def _root(params: SystemParams, s: int, x):
    c, b = params.speed(s), params.b[abs(s) - 1]
    return c * c * np.square(x) + b * b


def dispersion_1d(params: SystemParams, s: int, x, order: int = 0):
    """d^n/dx^n of Λ_s(x) = s·√(c²x²+b²) for real (signed) x, n ≤ 4."""
    c, b = params.speed(s), params.b[abs(s) - 1]
    x = np.asarray(x, dtype=float)
    D = c * c * x * x + b * b
    sign = np.sign(s)
    if order == 0:
        out = np.sqrt(D)
    elif order == 1:
        out = c * c * x / np.sqrt(D)
    elif order == 2:
        out = c * c * b * b / D ** 1.5
    elif order == 3:
        out = -3 * c ** 4 * b * b * x / D ** 2.5
    elif order == 4:
        out = 3 * c ** 4 * b * b * (4 * c * c * x * x - b * b) / D ** 3.5
    else:
        raise ValueError(f"derivative order {order} > 4 is not available in closed form")
    return sign * out


def _grad(params: SystemParams, s: int, z: np.ndarray) -> np.ndarray:
    c = params.speed(s)
    return np.sign(s) * c * c * z / np.sqrt(_root(params, s, np.linalg.norm(z, axis=-1)))[..., None]


def _hess(params: SystemParams, s: int, z: np.ndarray) -> np.ndarray:
    c = params.speed(s)
    D = _root(params, s, np.linalg.norm(z, axis=-1))[..., None, None]
    eye = np.eye(3)
    outer = z[..., :, None] * z[..., None, :]
    return np.sign(s) * (c * c * eye / np.sqrt(D) - c ** 4 * outer / D ** 1.5)


def eval_phase(params: SystemParams, triple: PhaseTriple, xi, eta):
    """Φ_σμν(ξ,η) = Λ_σ(ξ) − Λ_μ(ξ−η) − Λ_ν(η); broadcasts over leading axes."""
    xi, eta = np.asarray(xi, dtype=float), np.asarray(eta, dtype=float)
    norm = lambda v: np.linalg.norm(v, axis=-1)
    return (params.dispersion(triple.sigma, norm(xi))
            - params.dispersion(triple.mu, norm(xi - eta))
            - params.dispersion(triple.nu, norm(eta)))


def phase_derivatives(params: SystemParams, triple: PhaseTriple, xi, eta) -> Dict[str, np.ndarray]:
    xi, eta = np.asarray(xi, dtype=float), np.asarray(eta, dtype=float)
    diff = xi - eta
    return {
        "grad_eta": _grad(params, triple.mu, diff) - _grad(params, triple.nu, eta),
        "hess_eta": -_hess(params, triple.mu, diff) - _hess(params, triple.nu, eta),
        "grad_xi": _grad(params, triple.sigma, xi) - _grad(params, triple.mu, diff),
    }


def parallel_phase(params: SystemParams, triple: PhaseTriple, alpha, beta, max_order: int = 2) -> List:
    """[∂_β^n Φ⁺(α,β) for n = 0..max_order]."""
    if not 0 <= max_order <= 4:
        raise ValueError(f"max_order must be in 0..4, got {max_order}")
    alpha, beta = np.asarray(alpha, dtype=float), np.asarray(beta, dtype=float)
    out = [dispersion_1d(params, triple.sigma, alpha)
           - dispersion_1d(params, triple.mu, alpha - beta)
           - dispersion_1d(params, triple.nu, beta)]
    for n in range(1, max_order + 1):
        out.append(-(-1) ** n * dispersion_1d(params, triple.mu, alpha - beta, n)
                   - dispersion_1d(params, triple.nu, beta, n))
    return out


def parallel_phase_dalpha(params: SystemParams, triple: PhaseTriple, alpha, beta, max_order: int = 2) -> List:
    """[∂_α^n Φ⁺(α,β) for n = 0..max_order]."""
    alpha, beta = np.asarray(alpha, dtype=float), np.asarray(beta, dtype=float)
    out = parallel_phase(params, triple, alpha, beta, 0)
    for n in range(1, max_order + 1):
        out.append(dispersion_1d(params, triple.sigma, alpha, n)
                   - dispersion_1d(params, triple.mu, alpha - beta, n))
    return out


def parallel_jacobian(params: SystemParams, triple: PhaseTriple, alpha: float, beta: float):
    """(F, J) for F = (Φ⁺, ∂_βΦ⁺) and its Jacobian in (α, β)."""
    m, n = triple.mu, triple.nu
    phi, dphi_b, d2phi_b = parallel_phase(params, triple, alpha, beta, 2)
    dphi_a = parallel_phase_dalpha(params, triple, alpha, beta, 1)[1]
    dab = dispersion_1d(params, m, alpha - beta, 2)
    F = np.array([phi, dphi_b], dtype=float)
    J = np.array([[dphi_a, dphi_b], [dab, d2phi_b]], dtype=float)
    return F, J


def collinear(alpha, beta, direction=(0.0, 0.0, 1.0)):
    e = np.asarray(direction, dtype=float)
    e = e / np.linalg.norm(e)
    return np.multiply.outer(alpha, e), np.multiply.outer(beta, e)
