from typing import Sequence

import numpy as np

from flow.core import derivative, vector_fields
from models.field import SpectralField
from models.system import SystemParams
from tools.errors import DomainError


def _S(params: SystemParams, u: Sequence[SpectralField]):
    """S^{jk}_{αβ} = Σ_γ (A^{jk}_{αβγ} u_γ + Σ_l B^{jkl}_{αβγ} ∂_l u_γ) on the physical grid."""
    if not (np.any(params.A) or np.any(params.B)):
        return None
    S = np.zeros((params.d, params.d, 3, 3) + u[0].values.shape)
    phys = [w.physical().real for w in u]
    grads = [[derivative(w, l).physical().real for l in range(3)] for w in u]
    for a, b, g, j, k in zip(*np.nonzero(params.A)):
        S[a, b, j, k] += params.A[a, b, g, j, k] * phys[g]
    for a, b, g, j, k, l in zip(*np.nonzero(params.B)):
        S[a, b, j, k] += params.B[a, b, g, j, k, l] * grads[g][l]
    return S


def symmetrized_energy(u: Sequence[SpectralField], du: Sequence[SpectralField], params: SystemParams,
                       order: int = 0, cap: int = 2) -> float:
    """Quadratic energy of Γ^μ u, |μ| ≤ order, plus the cubic correction Σ S^{jk}_{αβ} ∂_jΓ^μu_α ∂_kΓ^μu_β."""
    if order < 0 or order > cap:
        raise DomainError(f"energy order {order} outside 0..{cap}", order=order, cap=cap)
    if len(u) != params.d or len(du) != params.d:
        raise DomainError(f"need {params.d} components, got {len(u)} and {len(du)}")
    S = _S(params, u)
    dx3 = u[0].spacing ** 3
    words_u = [vector_fields(w, order, cap) for w in u]
    words_du = [vector_fields(w, order, cap) for w in du]
    total = 0.0
    for word in words_u[0]:
        grads = []
        for a in range(params.d):
            gu, gdu = words_u[a][word], words_du[a][word]
            total += gdu.l2_norm() ** 2 + params.b[a] ** 2 * gu.l2_norm() ** 2
            grad = [derivative(gu, j) for j in range(3)]
            total += params.c[a] ** 2 * sum(g.l2_norm() ** 2 for g in grad)
            if S is not None:
                grads.append([g.physical().real for g in grad])
        if S is None:
            continue
        for a in range(params.d):
            for b in range(params.d):
                for j in range(3):
                    for k in range(3):
                        if np.any(S[a, b, j, k]):
                            total += dx3 * float(np.sum(S[a, b, j, k] * grads[a][j] * grads[b][k]))
    return float(total)
