from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy import special

from config import defaults
from tools.errors import CostError, DomainError

# phase change allowed across one quadrature cell
CELL_PHASE = np.pi / 4


@dataclass(frozen=True)
class IbpParameters:
    K: float
    n: int
    eps: Tuple[float, ...]
    lam: float = 1.0
    gamma: float = field(default_factory=lambda: defaults["ibp_gamma"])
    # scale of the phase derivatives, only meaningful for n = 1
    lam_prime: Optional[float] = None

    def check(self) -> "IbpParameters":
        if not self.K >= 1:
            raise DomainError(f"K must be >= 1, got {self.K}", K=self.K)
        if self.n < 1 or len(self.eps) != self.n:
            raise DomainError(f"need n >= 1 and exactly n eps values, got n={self.n}, eps={list(self.eps)}",
                              n=self.n)
        if any(not e > 0 for e in self.eps):
            raise DomainError(f"eps values must be positive, got {list(self.eps)}")
        if not self.lam >= 1:
            raise DomainError(f"lambda must be >= 1, got {self.lam}", lam=self.lam)
        if not self.gamma > 0:
            raise DomainError(f"gamma must be positive, got {self.gamma}", gamma=self.gamma)
        if self.lam_prime is not None and (self.n != 1 or not self.lam_prime >= 1):
            raise DomainError("lam_prime needs n = 1 and lam_prime >= 1", lam_prime=self.lam_prime)
        return self


def ibp_bound(p: IbpParameters) -> Dict[str, float]:
    """M and the resulting bound exp(-γ M^γ) for ∫ e^{iKΦ} h."""
    p.check()
    K, eps, e1 = p.K, p.eps, p.eps[0]
    if p.lam_prime is not None:
        terms = [K * e1 ** 2 / p.lam_prime ** 2, K * e1 / p.lam]
    else:
        terms = [K * e1 * eps[j] / eps[j + 1] for j in range(p.n - 1)]
        terms += [K * e1 * eps[-1], K * e1 / p.lam]
    M = float(min(terms))
    return {"M": M, "bound": float(np.exp(-p.gamma * M ** p.gamma)), "gamma": p.gamma, "terms": terms}


def special_choice_eps(eps: float, n: int) -> Tuple[float, ...]:
    """ε_j = ε^{(n-j+1)/n}, for which M = min(Kε^{(n+1)/n}, Kε/λ)."""
    return tuple(eps ** ((n - j + 1) / n) for j in range(1, n + 1))


def radimp_bound(k: int, k1: int, k2: int, eps: float) -> float:
    """min(2^{k/2}, 2^{-min(k,0)/2} ε^{1/2}) · 2^{-(k1+k2)}."""
    if not eps > 0:
        raise DomainError(f"eps must be positive, got {eps}", eps=eps)
    return float(min(2.0 ** (k / 2), 2.0 ** (-min(k, 0) / 2) * np.sqrt(eps)) * 2.0 ** -(k1 + k2))


@dataclass
class QuadratureResult:
    value: complex
    error: float
    cells: int
    K: float

    def to_dict(self) -> dict:
        return {"value": {"re": float(self.value.real), "im": float(self.value.imag)},
                "error": float(self.error), "cells": int(self.cells), "K": float(self.K)}


def _max_slope(phase: Callable, box: Sequence[Tuple[float, float]], samples: int) -> float:
    axes = [np.linspace(lo, hi, samples) for lo, hi in box]
    grid = np.meshgrid(*axes, indexing="ij")
    values = np.asarray(phase(*grid), dtype=float)
    steps = [a[1] - a[0] for a in axes]
    grads = np.gradient(values, *steps) if len(axes) > 1 else [np.gradient(values, steps[0])]
    return float(np.max(np.sqrt(sum(g ** 2 for g in grads))))


def _gauss_cells(edges: np.ndarray, order: int):
    nodes, weights = special.roots_legendre(order)
    mid, half = (edges[1:] + edges[:-1]) / 2, (edges[1:] - edges[:-1]) / 2
    return mid[:, None] + half[:, None] * nodes[None, :], half[:, None] * weights[None, :]


def osc_integral(phase: Callable, amplitude: Callable, K: float, box: Sequence[Tuple[float, float]],
                 tol: float = 1e-10, order: int = 8, max_cells: int = None, max_refine: int = 12) -> QuadratureResult:
    """∫_box e^{iKΦ(x)} h(x) dx in one or three dimensions.

    The box is cut into cells over which KΦ moves by less than π/4; each cell is
    integrated with Gauss-Legendre of ``order`` and ``2·order`` nodes, and in 1-D
    cells whose two values disagree by more than their share of ``tol`` are halved.
    """
    box = [tuple(map(float, b)) for b in box]
    dims = len(box)
    if dims not in (1, 3):
        raise DomainError(f"osc_integral works in 1 or 3 dimensions, got {dims}", dims=dims)
    max_cells = defaults["max_cells"] if max_cells is None else max_cells
    slope = _max_slope(phase, box, 257 if dims == 1 else 33)
    widths = np.array([hi - lo for lo, hi in box])
    per_axis = np.maximum(np.ceil(K * slope * widths / CELL_PHASE), 4).astype(int)
    cells = int(np.prod(per_axis)) * (order * 2) ** (dims - 1)
    if cells > max_cells:
        shrink = (max_cells / cells) ** (1 / dims)
        raise CostError(f"K={K:g} needs {cells} cells, budget is {max_cells}", suggested_max_K=K * shrink,
                        cells=cells)
    integrand = lambda *x: np.exp(1j * K * np.asarray(phase(*x), dtype=float)) * amplitude(*x)

    if dims == 1:
        lo, hi = box[0]
        edge = np.abs(amplitude(np.array([lo, hi])))
        if np.max(edge) > 1e-12:
            logger.warning(f"amplitude is {np.max(edge):.3g} on the box edge; its support is not inside the box")
        edges = np.linspace(lo, hi, per_axis[0] + 1)
        return _adaptive_1d(integrand, edges[:-1], edges[1:], order, tol, max_refine, K)

    axes = []
    for (lo, hi), count in zip(box, per_axis):
        x, w = _gauss_cells(np.linspace(lo, hi, count + 1), order)
        axes.append((x.ravel(), w.ravel()))
    coarse = _tensor_sum(integrand, axes)
    fine_axes = []
    for (lo, hi), count in zip(box, per_axis):
        x, w = _gauss_cells(np.linspace(lo, hi, count + 1), 2 * order)
        fine_axes.append((x.ravel(), w.ravel()))
    fine = _tensor_sum(integrand, fine_axes)
    return QuadratureResult(complex(fine), float(abs(fine - coarse)), int(np.prod(per_axis)), K)


def _tensor_sum(integrand, axes) -> complex:
    (x, wx), (y, wy), (z, wz) = axes
    total = 0j
    # slab by slab in x keeps memory bounded and the reduction order fixed
    for xi, wxi in zip(x, wx):
        values = integrand(np.full((len(y), len(z)), xi), y[:, None] + 0 * z[None, :], z[None, :] + 0 * y[:, None])
        total += wxi * np.sum(wy[:, None] * wz[None, :] * values)
    return total


def _adaptive_1d(integrand, left, right, order, tol, depth, K) -> QuadratureResult:
    lo, hi = left[0], right[-1]
    count = len(left)
    nodes, weights = special.roots_legendre(order)
    nodes2, weights2 = special.roots_legendre(2 * order)
    values, errors = [], []
    for level in range(depth + 1):
        mid, half = (left + right) / 2, (right - left) / 2
        coarse = np.sum(half[:, None] * weights * integrand(mid[:, None] + half[:, None] * nodes), axis=1)
        fine = np.sum(half[:, None] * weights2 * integrand(mid[:, None] + half[:, None] * nodes2), axis=1)
        err = np.abs(fine - coarse)
        ok = err <= tol * (right - left) / (hi - lo)
        if level == depth:
            ok[:] = True
        values.append(fine[ok])
        errors.append(err[ok])
        if ok.all():
            break
        l, r = left[~ok], right[~ok]
        m = (l + r) / 2
        left, right = np.concatenate([l, m]), np.concatenate([m, r])
        # fixed reduction order
        key = np.argsort(left, kind="stable")
        left, right = left[key], right[key]
    values, errors = np.concatenate(values), np.concatenate(errors)
    return QuadratureResult(complex(np.sum(values)), float(np.sum(errors)), count, K)
