from itertools import product
from typing import Dict, Tuple

import numpy as np

from models.field import SpectralField, COMPLEX
from models.system import SystemParams
from tools.errors import DomainError

GENERATORS = ("d1", "d2", "d3", "O12", "O13", "O23")


def propagate(f: SpectralField, params: SystemParams, sigma: int, t: float) -> SpectralField:
    """e^{itΛ_σ} applied on the Fourier side."""
    if sigma == 0 or abs(sigma) > params.d:
        raise DomainError(f"component index {sigma} outside ±1..{params.d}", sigma=sigma)
    if t == 0:
        return f
    phase = np.exp(1j * t * params.dispersion(sigma, f.xi_mag()))
    return f.with_values(f.values * phase, tag=COMPLEX)


def derivative_symbols(n: int, spacing: float):
    """iξ_1, iξ_2, iξ_3 as broadcastable arrays."""
    k = np.fft.fftfreq(n, d=spacing) * 2 * np.pi
    if n % 2 == 0:
        # the Nyquist mode has no partner of opposite sign
        k[n // 2] = 0.0
    shapes = [(n, 1, 1), (1, n, 1), (1, 1, n)]
    return [1j * k.reshape(s) for s in shapes]


def derivative(f: SpectralField, axis: int) -> SpectralField:
    return f.with_values(f.values * derivative_symbols(f.resolution, f.spacing)[axis])


def rotation(f: SpectralField, i: int, j: int) -> SpectralField:
    """Ω_ij f = x_i ∂_j f − x_j ∂_i f, the product taken on the centred physical grid."""
    x = f.coords()
    di, dj = derivative(f, i).physical(), derivative(f, j).physical()
    samples = x[i] * dj - x[j] * di
    return f.with_values(SpectralField.from_physical(samples, f.box_length, f.component, tag=f.tag).values)


def apply_generator(f: SpectralField, name: str) -> SpectralField:
    if name.startswith("d"):
        return derivative(f, int(name[1]) - 1)
    i, j = int(name[1]) - 1, int(name[2]) - 1
    return rotation(f, i, j)


def vector_fields(f: SpectralField, order: int, cap: int = 2) -> Dict[Tuple[str, ...], SpectralField]:
    """Γ^μ f for every word μ in (∂_1, ∂_2, ∂_3, Ω_12, Ω_13, Ω_23) of length ≤ order."""
    if order < 0 or order > cap:
        raise DomainError(f"vector-field order {order} outside 0..{cap}", order=order, cap=cap)
    words: Dict[Tuple[str, ...], SpectralField] = {(): f}
    for length in range(1, order + 1):
        for word in product(GENERATORS, repeat=length):
            # Γ^μ applies the rightmost generator first
            words[word] = apply_generator(words[word[1:]], word[0])
    return words
