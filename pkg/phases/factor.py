"""Cubic factorization of ∂_βΦ⁺ and the expansion of Φ⁺ around zeros of Q.

Squaring ∂_βΦ⁺ = Λ'_μ(α−β) − Λ'_ν(β) = 0 clears both square roots and leaves a
quartic q(β) whose roots are the true roots (Λ'_μ = Λ'_ν) together with the
spurious ones (Λ'_μ = −Λ'_ν). The true roots and, when only one of them is real,
the complex pair make up the cubic (β−R1)((β−R2)²−Q).
"""
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from loguru import logger
from numpy.polynomial import Polynomial
from scipy import optimize

from models.system import SystemParams, PhaseTriple, with_masses_speeds
from phases.core import dispersion_1d, parallel_phase, parallel_phase_dalpha
from tools.errors import DomainError, FactorizationError, ParameterError


@dataclass
class RootSplit:
    R1: float
    R2: float
    Q: float
    true_roots: List[float]
    spurious_roots: List[float]
    absorbed: bool = False


@dataclass
class PhaseFactorization:
    R1: Optional[Callable] = None
    R2: Optional[Callable] = None
    Q: Optional[Callable] = None
    P: Optional[Callable] = None
    sign: int = 1
    R3: Optional[Callable] = None
    R4: Optional[Callable] = None
    Q_zeros: List[float] = field(default_factory=list)
    Q_slopes: List[float] = field(default_factory=list)
    Q_zero_gaps: List[float] = field(default_factory=list)
    reduced: bool = False
    rho: Optional[float] = None
    alphas: Optional[np.ndarray] = None
    absorbed_alphas: List[float] = field(default_factory=list)

    def summary(self) -> dict:
        out = {"reduced": self.reduced, "sign": self.sign}
        if self.reduced:
            out["root"] = "beta = rho * alpha"
            out["rho"] = self.rho
            return out
        out.update({
            "alpha_range": [float(self.alphas[0]), float(self.alphas[-1])],
            "samples": int(len(self.alphas)),
            "Q_zeros": [float(a) for a in self.Q_zeros],
            "Q_slopes": [float(s) for s in self.Q_slopes],
            "Q_zero_gaps": [float(g) for g in self.Q_zero_gaps],
            "absorbed_samples": len(self.absorbed_alphas),
        })
        return out


def _quartic(params: SystemParams, triple: PhaseTriple, alpha: float) -> Polynomial:
    """c_μ⁴w²D_ν − c_ν⁴β²D_μ with w = α−β, as a polynomial in β."""
    cm, cn = params.speed(triple.mu), params.speed(triple.nu)
    bm, bn = params.mass(triple.mu), params.mass(triple.nu)
    beta = Polynomial([0.0, 1.0])
    w = Polynomial([alpha, -1.0])
    return cm ** 4 * w ** 2 * (cn ** 2 * beta ** 2 + bn ** 2) - cn ** 4 * beta ** 2 * (cm ** 2 * w ** 2 + bm ** 2)


def _polish(poly: Polynomial, z: complex, steps: int = 8) -> complex:
    d = poly.deriv()
    for _ in range(steps):
        slope = d(z)
        if slope == 0:
            break
        nz = z - poly(z) / slope
        if not abs(poly(nz)) < abs(poly(z)):
            break
        z = nz
    return z


def _newton_dbeta(params, triple, alpha, beta, tol=1e-14, steps=30) -> float:
    for _ in range(steps):
        _, f, fp = parallel_phase(params, triple, alpha, beta, 2)
        if fp == 0 or not np.isfinite(fp):
            break
        step = float(f / fp)
        beta -= step
        if abs(step) <= tol * (1 + abs(beta)):
            break
    return float(beta)


def _classify(params, triple, alpha):
    poly = _quartic(params, triple, alpha)
    roots = [_polish(poly, complex(z)) for z in poly.roots()]
    real, pairs = [], []
    for z in roots:
        if abs(z.imag) <= 1e-9 * (1 + abs(z)):
            real.append(z.real)
        elif z.imag > 0:
            pairs.append(z)
    true, spurious, ambiguous = [], [], []
    for r in real:
        a = dispersion_1d(params, triple.mu, alpha - r, 1)
        b = dispersion_1d(params, triple.nu, r, 1)
        if abs(a) + abs(b) < 1e-9:
            ambiguous.append(r)
        elif abs(a - b) <= abs(a + b):
            true.append(r)
        else:
            spurious.append(r)
    # a double root at α = β = 0 is one true and one spurious root
    for r in ambiguous:
        (true if len(true) % 2 == 0 else spurious).append(r)
    if len(true) % 2 == 0 or len(spurious) % 2 == 0 or len(true) + len(spurious) + 2 * len(pairs) != 4:
        raise FactorizationError(f"cannot separate true and spurious roots at alpha={alpha:.12g}: "
                                 f"{len(true)} true, {len(spurious)} spurious, {len(pairs)} complex pairs",
                                 alpha=alpha)
    true = sorted(_newton_dbeta(params, triple, alpha, r) for r in true)
    return true, sorted(spurious), pairs


def _initial_R1(true: List[float]) -> int:
    if len(true) == 1:
        return 0
    gaps = [min(abs(r - s) for j, s in enumerate(true) if j != i) for i, r in enumerate(true)]
    return int(np.argmax(gaps))


def _split(params, triple, alpha, hint: Optional[float]) -> RootSplit:
    true, spurious, pairs = _classify(params, triple, alpha)
    if len(true) == 3:
        i = _initial_R1(true) if hint is None else int(np.argmin([abs(r - hint) for r in true]))
        R1 = true[i]
        p1, p2 = sorted(r for j, r in enumerate(true) if j != i)
        return RootSplit(R1, (p1 + p2) / 2, ((p2 - p1) / 2) ** 2, true, spurious)
    R1 = true[0]
    if pairs:
        z = pairs[0]
        return RootSplit(R1, float(z.real), -float(z.imag) ** 2, true, spurious)
    # one true root and three spurious ones: the quadratic factor has no roots of its own
    return RootSplit(R1, R1, -1.0, true, spurious, absorbed=True)


def _equal_speed_factorization(params: SystemParams, triple: PhaseTriple) -> PhaseFactorization:
    bm, bn = params.mass(triple.mu), params.mass(triple.nu)
    if bm + bn == 0:
        logger.warning(f"{triple}: ∂_βΦ⁺ vanishes only on α = 0 (b_μ + b_ν = 0)")
        return PhaseFactorization(reduced=True, rho=None)
    rho = bn / (bm + bn)
    return PhaseFactorization(reduced=True, rho=rho, R1=lambda a: rho * np.asarray(a, dtype=float))


def factor_dbeta(params: SystemParams, triple: PhaseTriple, alpha_range: Sequence[float] = (-5.0, 5.0),
                 samples: int = 401) -> PhaseFactorization:
    triple.check(params.d)
    if params.speed(triple.mu) == params.speed(triple.nu):
        return _equal_speed_factorization(params, triple)
    lo, hi = map(float, alpha_range)
    if not hi > lo or samples < 2:
        raise DomainError(f"alpha range must be increasing with at least 2 samples, got {alpha_range}, {samples}")
    alphas = np.linspace(lo, hi, samples)
    splits: List[Optional[RootSplit]] = [None] * samples
    plain = [_classify(params, triple, a)[0] for a in alphas]
    singles = [i for i, t in enumerate(plain) if len(t) == 1]
    anchor = singles[0] if singles else 0
    splits[anchor] = _split(params, triple, alphas[anchor], None)
    for i in range(anchor + 1, samples):
        splits[i] = _split(params, triple, alphas[i], splits[i - 1].R1)
    for i in range(anchor - 1, -1, -1):
        splits[i] = _split(params, triple, alphas[i], splits[i + 1].R1)
    table = np.array([s.R1 for s in splits])

    sign = int(-np.sign(np.sign(triple.mu) * params.speed(triple.mu) + np.sign(triple.nu) * params.speed(triple.nu)))

    @lru_cache(maxsize=4096)
    def at(alpha: float) -> RootSplit:
        return _split(params, triple, alpha, float(np.interp(alpha, alphas, table)))

    def sampler(name):
        def evaluate(alpha):
            a = np.asarray(alpha, dtype=float)
            out = np.array([getattr(at(float(x)), name) for x in a.ravel()])
            return float(out[0]) if a.ndim == 0 else out.reshape(a.shape)
        return evaluate

    R1, R2, Q = sampler("R1"), sampler("R2"), sampler("Q")
    R3 = lambda a: R2(a) + np.sqrt(np.abs(Q(a)))
    R4 = lambda a: R2(a) - np.sqrt(np.abs(Q(a)))

    def P(alpha, beta):
        alpha, beta = np.broadcast_arrays(np.asarray(alpha, dtype=float), np.asarray(beta, dtype=float))
        out = np.empty(alpha.shape)
        for a in np.unique(alpha):
            mask = alpha == a
            out[mask] = _p_values(params, triple, at(float(a)), float(a), beta[mask], sign)
        return float(out) if out.ndim == 0 else out

    fac = PhaseFactorization(R1=R1, R2=R2, Q=Q, P=P, sign=sign, R3=R3, R4=R4, alphas=alphas,
                             absorbed_alphas=[float(a) for a, s in zip(alphas, splits) if s.absorbed])
    _locate_Q_zeros(fac, splits)
    logger.debug(f"Factored ∂_βΦ⁺ for {triple} on [{lo}, {hi}]: Q zeros {fac.Q_zeros}")
    return fac


def _p_values(params, triple, split: RootSplit, alpha: float, beta: np.ndarray, sign: int) -> np.ndarray:
    _, d1, d2, d3 = parallel_phase(params, triple, alpha, beta, 3)
    u, v = beta - split.R1, beta - split.R2
    cubic = u * (v * v - split.Q)
    c1 = v * v - split.Q + 2 * u * v
    c2 = 2 * u + 4 * v
    scale = (1 + np.abs(beta)) ** 3
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(np.abs(cubic) > 1e-10 * scale, d1 / (sign * cubic),
                       np.where(np.abs(c1) > 1e-6 * scale, d2 / (sign * c1), d3 / (sign * c2)))
    return out


def _locate_Q_zeros(fac: PhaseFactorization, splits: List[RootSplit]) -> None:
    alphas = fac.alphas
    qs = np.array([s.Q for s in splits])
    absorbed = np.array([s.absorbed for s in splits])
    for i in np.nonzero(np.sign(qs[:-1]) * np.sign(qs[1:]) < 0)[0]:
        if absorbed[i] or absorbed[i + 1]:
            continue
        a0 = optimize.brentq(fac.Q, alphas[i], alphas[i + 1], xtol=1e-14)
        h = 1e-6 * (1 + abs(a0))
        slope = (fac.Q(a0 + h) - fac.Q(a0 - h)) / (2 * h)
        if not abs(slope) > 1e-8:
            logger.warning(f"Q zero at alpha={a0:.12g} is not simple (Q'={slope:.3g}); skipped")
            continue
        near = np.linspace(a0 - 1e-3, a0 + 1e-3, 21)
        fac.Q_zeros.append(float(a0))
        fac.Q_slopes.append(float(slope))
        fac.Q_zero_gaps.append(float(np.min(np.abs(fac.R1(near) - fac.R2(near)))))


def reconstruction_residual(params: SystemParams, triple: PhaseTriple, fac: PhaseFactorization,
                            alphas, betas, floor: float = 1e-6) -> Dict[str, float]:
    """Max relative defect of sign·P·(β−R1)((β−R2)²−Q) against ∂_βΦ⁺ where |∂_βΦ⁺| ≥ floor."""
    A, Bt = np.meshgrid(np.asarray(alphas, dtype=float), np.asarray(betas, dtype=float), indexing="ij")
    exact = parallel_phase(params, triple, A, Bt, 1)[1]
    R1, R2, Q = fac.R1(A[:, 0])[:, None], fac.R2(A[:, 0])[:, None], fac.Q(A[:, 0])[:, None]
    rebuilt = fac.sign * fac.P(A, Bt) * (Bt - R1) * ((Bt - R2) ** 2 - Q)
    mask = np.abs(exact) >= floor
    rel = np.abs(rebuilt - exact)[mask] / np.abs(exact)[mask]
    p = fac.P(A, Bt)
    return {"max_relative": float(np.max(rel)) if rel.size else 0.0, "checked": int(mask.sum()),
            "min_P": float(np.min(p)), "max_P": float(np.max(p))}


def _loglog(h: np.ndarray, values: np.ndarray) -> float:
    return float(np.polyfit(np.log(h), np.log(values), 1)[0])


def expansion_at_Q_zero(params: SystemParams, triple: PhaseTriple, alpha0: float,
                        decade: Sequence[float] = (1e-4, 1e-2), points: int = 13,
                        tol: float = 1e-8, fac: PhaseFactorization = None) -> Dict[str, float]:
    """Φ⁺(α,R3(α)) = λ(α−α₀) + λ'_±|α−α₀|^{3/2} + ... on each side of a zero α₀ of Q."""
    if fac is None:
        fac = factor_dbeta(params, triple, (alpha0 - 0.1, alpha0 + 0.1), 81)
    if fac.reduced:
        raise DomainError("equal speeds c_μ = c_ν: Q is not defined", alpha=alpha0)
    q0 = fac.Q(alpha0)
    beta0 = fac.R2(alpha0)
    phi0 = parallel_phase(params, triple, alpha0, beta0, 0)[0]
    if abs(q0) > tol or abs(phi0) > tol:
        raise DomainError(f"alpha0={alpha0:.12g} is not a resonant zero of Q: |Q|={abs(q0):.3g}, "
                          f"|Φ⁺(α₀,R₂)|={abs(phi0):.3g}", alpha=alpha0, Q=float(q0), phi=float(phi0))
    lam = float(parallel_phase_dalpha(params, triple, alpha0, beta0, 1)[1])
    h = np.geomspace(decade[0], decade[1], points)
    out = {"alpha0": float(alpha0), "beta0": float(beta0), "lambda": lam, "decade": list(map(float, decade))}
    exponents = []
    for side, s in (("left", -1.0), ("right", 1.0)):
        a = alpha0 + s * h
        phi = parallel_phase(params, triple, a, fac.R3(a), 0)[0]
        defect = phi - lam * s * h
        out[f"lambda_prime_{side}"] = float(np.median(defect / h ** 1.5))
        out[f"fit_exponent_{side}"] = _loglog(h, np.abs(defect))
        exponents.append(out[f"fit_exponent_{side}"])
    out["fit_exponent"] = float(np.mean(exponents))
    out["lambda_zero"] = abs(lam) <= tol
    if out["lambda_zero"]:
        growth = []
        for side, s in (("left", -1.0), ("right", 1.0)):
            a = alpha0 + s * h
            step = 1e-3 * h
            F = lambda x: parallel_phase(params, triple, x, fac.R3(x), 0)[0]
            derivative = np.abs((F(a + step) - F(a - step)) / (2 * step))
            out[f"derivative_exponent_{side}"] = _loglog(h, derivative)
            growth.append(out[f"derivative_exponent_{side}"])
        out["derivative_exponent"] = float(np.mean(growth))
    return out


def tune_sigma(params: SystemParams, triple: PhaseTriple, alpha0: float, match_derivative: bool = False,
               fac: PhaseFactorization = None) -> SystemParams:
    """Rescale component |σ| so that Φ⁺(α₀,R₂(α₀)) = 0, and also ∂_αΦ⁺ = 0 when match_derivative.

    R₂ and Q only involve μ and ν, so α₀ stays a zero of Q after the change.
    """
    k = abs(triple.sigma)
    if k in (abs(triple.mu), abs(triple.nu)):
        raise DomainError(f"component {k} of sigma is shared with mu or nu", triple=triple.as_list())
    if fac is None:
        fac = factor_dbeta(params, triple, (alpha0 - 0.1, alpha0 + 0.1), 81)
    beta0 = fac.R2(alpha0)
    V = float(dispersion_1d(params, triple.mu, alpha0 - beta0) + dispersion_1d(params, triple.nu, beta0))
    if np.sign(V) != np.sign(triple.sigma):
        raise DomainError(f"Λ_σ(α₀) must equal {V:.6g}; use sigma with the sign of that value",
                          triple=triple.as_list(), target=V)
    c = params.speed(triple.sigma)
    if match_derivative:
        W = float(dispersion_1d(params, triple.mu, alpha0 - beta0, 1))
        c2, b2 = W * V / alpha0, V * V - W * V * alpha0
    else:
        c2, b2 = c * c, V * V - c * c * alpha0 * alpha0
    if not (c2 > 0 and b2 > 0):
        raise ParameterError(f"no positive (b, c) for component {k} matches alpha0={alpha0:.6g}",
                             b2=b2, c2=c2)
    b, speeds = list(params.b), list(params.c)
    b[k - 1], speeds[k - 1] = float(np.sqrt(b2)), float(np.sqrt(c2))
    logger.debug(f"Tuned component {k}: b={b[k - 1]:.12g}, c={speeds[k - 1]:.12g}")
    return with_masses_speeds(params, b, speeds)
