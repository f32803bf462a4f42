import numpy as np

from flow.core import derivative, propagate, rotation, vector_fields
from models.field import SpectralField
from presets import angular_gain, presets
from verify.registry import VerifyContext, invariant, outcome


def _lumpy(n: int, box_length: float, scale: float = 1.0) -> SpectralField:
    """Anisotropic off-centre Gaussian, so every rotation acts nontrivially."""
    f = SpectralField.zeros(n, box_length)
    x, y, z = (w / scale for w in f.coords())
    return SpectralField.from_physical(np.exp(-((x - 0.7) ** 2 + 2 * (y + 0.4) ** 2 + (z - 0.2) ** 2 / 1.5) / 2),
                                       box_length)


@invariant("flow", "free_flow_unitary")
def free_flow_unitary(context: VerifyContext) -> dict:
    f = _lumpy(16, 16.0)
    g, norm0 = f, f.l2_norm()
    for _ in range(1000):
        g = propagate(g, context.params, 1, 0.1)
    drift = abs(g.l2_norm() - norm0) / norm0
    return outcome(drift <= 1e-10, drift, 1e-10, steps=1000)


@invariant("flow", "vector_field_words_finite")
def vector_field_words_finite(context: VerifyContext) -> dict:
    words = vector_fields(_lumpy(16, 16.0), context.caps.gamma_order, cap=context.caps.gamma_order)
    norms = [w.l2_norm() for w in words.values()]
    return outcome(all(np.isfinite(norms)), float(max(norms)), None, words=len(words))


@invariant("flow", "derivative_rotation_bracket")
def derivative_rotation_bracket(context: VerifyContext) -> dict:
    """[∂_1, Ω_12] = ∂_2 and [∂_3, Ω_12] = 0."""
    f = _lumpy(48, 16.0)
    d1_then = derivative(rotation(f, 0, 1), 0)
    then_d1 = rotation(derivative(f, 0), 0, 1)
    target = derivative(f, 1)
    first = (d1_then - then_d1 - target).l2_norm() / target.l2_norm()
    second = (derivative(rotation(f, 0, 1), 2) - rotation(derivative(f, 2), 0, 1)).l2_norm() / target.l2_norm()
    worst = max(first, second)
    return outcome(worst <= 1e-6, worst, 1e-6)


@invariant("flow", "rotation_commutes_with_flow")
def rotation_commutes_with_flow(context: VerifyContext) -> dict:
    """Ω₁₂ e^{itΛ} f = e^{itΛ} Ω₁₂ f.

    The kernel of e^{itΛ} decays like exp(−b|x|/c), and x in Ω jumps at the box
    faces, so lengths are measured in c/b: the faces sit 24 of them from the data.
    """
    params = context.params
    length = params.speed(1) / params.b[0]
    t = 0.5 / params.b[0]
    f = _lumpy(128, 48.0 * length, scale=1.5 * length)
    a = rotation(propagate(f, params, 1, t), 0, 1)
    b = propagate(rotation(f, 0, 1), params, 1, t)
    gap = (a - b).l2_norm() / max(rotation(f, 0, 1).l2_norm(), 1e-300)
    return outcome(gap <= 1e-10, gap, 1e-10, t=t, box_length=f.box_length)


def _preset_check(name: str):
    def check(context: VerifyContext) -> dict:
        preset = presets[name]
        fit = preset.run(context.params)
        limit = preset.expected_slope + preset.tolerance
        return outcome(preset.passes(fit), fit.slope, limit, slope_ci=fit.slope_ci, regime=preset.regime)
    check.__name__ = f"decay_{name}"
    return check


for _name in presets:
    invariant("flow", f"decay_{_name}", slow=True)(_preset_check(_name))


@invariant("flow", "angular_mode_gain", slow=True)
def angular_mode_gain(context: VerifyContext) -> dict:
    found = angular_gain(context.params, ms=(8, 10))
    return outcome(all(found["gain"]), found["gain"], None, low=found["low"], high=found["high"],
                   degree_high=found["degree_high"])
