import numpy as np

from dyadic.core import DyadicIndex, localize_dyadic, phi_shell, project_frequency
from dyadic.spherical import kernel_operator_norm, spherical_project, zonal_bound_constant
from models.field import SpectralField
from verify.registry import VerifyContext, invariant, outcome


def _test_field(seed: int, n: int = 16, box_length: float = 16.0) -> SpectralField:
    """Smooth real field with no symmetry: a random mix of shifted Gaussians."""
    rng = np.random.default_rng(seed)
    f = SpectralField.zeros(n, box_length)
    x, y, z = f.coords()
    samples = np.zeros((n, n, n))
    for centre, weight in zip(rng.uniform(-2, 2, (4, 3)), rng.normal(size=4)):
        samples = samples + weight * np.exp(-((x - centre[0]) ** 2 + (y - centre[1]) ** 2
                                             + (z - centre[2]) ** 2) / 2)
    return SpectralField.from_physical(samples, box_length)


@invariant("dyadic", "partition_of_unity")
def partition_of_unity(context: VerifyContext) -> dict:
    x = np.geomspace(1e-3, 1e3, 2001)
    total = sum(phi_shell(k, x) for k in range(-15, 16))
    defect = float(np.max(np.abs(total - 1.0)))
    return outcome(defect <= 1e-12, defect, 1e-12, k_range=[-15, 15], x_range=[1e-3, 1e3])


@invariant("dyadic", "separated_shells_annihilate")
def separated_shells_annihilate(context: VerifyContext) -> dict:
    x = np.geomspace(1e-3, 1e3, 2001)
    pointwise = max(float(np.max(np.abs(phi_shell(k, x) * phi_shell(k + 2, x)))) for k in range(-10, 9))
    f = _test_field(context.seed)
    composed = project_frequency(project_frequency(f, -2), 0).l2_norm()
    value = max(pointwise, composed)
    return outcome(value == 0.0, value, 0.0)


@invariant("dyadic", "angular_projection_commutes_with_shells")
def angular_projection_commutes_with_shells(context: VerifyContext) -> dict:
    f = _test_field(context.seed)
    worst = 0.0
    for l in (0, 1, 2):
        a = spherical_project(localize_dyadic(f, "P_k", DyadicIndex(0, 0)), l)
        b = localize_dyadic(spherical_project(f, l), "P_k", DyadicIndex(0, 0))
        worst = max(worst, (a - b).l2_norm() / max(f.l2_norm(), 1e-300))
    return outcome(worst <= 1e-10, worst, 1e-10)


@invariant("dyadic", "projectors_contract")
def projectors_contract(context: VerifyContext) -> dict:
    f = _test_field(context.seed)
    norm = f.l2_norm()
    ratios = {f"S_{l}": spherical_project(f, l).l2_norm() / norm for l in range(3)}
    ratios.update({f"P_{k}": project_frequency(f, k).l2_norm() / norm for k in (-1, 0)})
    worst = max(ratios.values())
    return outcome(worst <= 1 + 1e-12, worst, 1 + 1e-12, ratios=ratios)


@invariant("dyadic", "zonal_kernel_bound")
def zonal_kernel_bound(context: VerifyContext) -> dict:
    found = zonal_bound_constant(range(9), np.linspace(0.01, np.pi, 400))
    return outcome(np.isfinite(found["C"]) and found["C"] < 1e3, found["C"], 1e3, worst_l=found["worst_l"],
                   worst_angle=found["worst_angle"])


@invariant("dyadic", "angular_projection_sup_bound")
def angular_projection_sup_bound(context: VerifyContext) -> dict:
    norms = [kernel_operator_norm(l) for l in range(9)]
    return outcome(max(norms) < 20.0, max(norms), 20.0, per_level=norms)
