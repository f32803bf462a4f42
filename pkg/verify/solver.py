import numpy as np

from flow.decay import fit_slope
from models.field import SpectralField, COMPLEX
from models.system import SystemParams, build_system
from solver.core import ProfileState, dealias, diagonalize, invert, velocities
from solver.evolve import evolve, initial_state, order_check, residual_check, scattering_trend
from verify.registry import VerifyContext, invariant, outcome, reference_system


@invariant("solver", "free_profiles_constant")
def free_profiles_constant(context: VerifyContext) -> dict:
    params = reference_system("single")
    initial = initial_state(params, 16, 16.0, 0.5)
    traj = evolve(initial, params, T=1.0, dt=0.1, output_dt=0.5)
    drift = max(s.distance(traj.states[0]) for s in traj.states) / traj.states[0].norm()
    return outcome(drift <= 1e-12, drift, 1e-12)


@invariant("solver", "fields_stay_real")
def fields_stay_real(context: VerifyContext) -> dict:
    params = reference_system("semilinear")
    traj = evolve(initial_state(params, 16, 16.0, 0.3), params, T=0.5, dt=0.05, output_dt=0.1)
    worst = 0.0
    for state in traj.states:
        for w in sum(invert(state, params), []):
            worst = max(worst, w.conjugate_defect() / max(float(np.max(np.abs(w.values))), 1e-300))
    return outcome(worst <= 1e-11, worst, 1e-11)


@invariant("solver", "equation_residual")
def equation_residual(context: VerifyContext) -> dict:
    params = reference_system("semilinear")
    traj = evolve(initial_state(params, 16, 16.0, 0.3), params, T=0.5, dt=0.05, output_dt=0.05)
    found = residual_check(traj, params)
    return outcome(found["max_relative"] <= 1e-2, found["max_relative"], 1e-2)


@invariant("solver", "rk4_order", slow=True)
def rk4_order(context: VerifyContext) -> dict:
    params = reference_system("semilinear")
    found = order_check(initial_state(params, 16, 16.0, 0.5), params, T=0.2, dt=0.05)
    return outcome(3.7 <= found["order"] <= 4.3, found["order"], [3.7, 4.3], errors=found["errors"])


def _quasilinear(sign: float) -> SystemParams:
    """Component 1 a smooth carrier, components 2 and 3 coupled through A^{jj}_{23} = ±A^{jj}_{32}."""
    params = build_system({"d": 3, "b": [1.0, 1.0, 1.0], "c": [1.0, 1.0, 1.0],
                           "A": [[2, 3, 1, j, j, 0.5] for j in (1, 2, 3)]
                           + [[3, 2, 1, j, j, 0.5] for j in (1, 2, 3)]})
    if sign > 0:
        return params
    A = params.A.copy()
    A[2, 1] *= -1
    # built directly, past the symmetry validation
    return SystemParams(d=params.d, b=params.b, c=params.c, A=A, B=params.B, Qprime=params.Qprime)


def _wave_packets(params: SystemParams, n: int = 32, box_length: float = 16.0):
    """u₁ a Gaussian; u₂ = cos(2x₁)·envelope at rest and u₃ = 0 moving, a quarter period behind."""
    base = SpectralField.zeros(n, box_length)
    x, y, z = base.coords()
    envelope = np.exp(-(x ** 2 + y ** 2 + z ** 2) / (2 * 1.5 ** 2))
    packet = 0.1 * envelope * np.cos(2 * x)
    lam = np.sqrt(params.c[1] ** 2 * 4 + params.b[1] ** 2)
    field = lambda samples, a: dealias(SpectralField.from_physical(samples, box_length, a))
    g = [field(0.1 * envelope, 1), field(packet, 2), field(0 * packet, 3)]
    h = [field(0 * envelope, 1), field(0 * packet, 2), field(lam * packet, 3)]
    return diagonalize(g, h, params)


@invariant("solver", "energy_needs_symmetric_coefficients", slow=True)
def energy_needs_symmetric_coefficients(context: VerifyContext) -> dict:
    drifts = {}
    for label, sign in (("symmetric", 1.0), ("antisymmetric", -1.0)):
        params = _quasilinear(sign)
        traj = evolve(_wave_packets(params), params, T=2.0, dt=0.1, output_dt=0.5)
        energies = [r["E"] for r in traj.diagnostics]
        drifts[label] = max(abs(e - energies[0]) for e in energies) / energies[0]
    ratio = drifts["antisymmetric"] / max(drifts["symmetric"], 1e-300)
    return outcome(ratio >= 2.0, ratio, 2.0, drifts=drifts)


SMALL_DATA = {"d": 1, "b": [1.0], "c": [1.0], "Qprime": [[1, 1, 1, 0, 0, 1.0]]}
# roughly evenly spaced in log t
FIT_TIMES = (10, 13, 16, 20, 25, 32, 40, 50, 63, 79, 100)


def half_wave_sup(state: ProfileState, params: SystemParams, component: int = 1) -> float:
    """sup |∂_t u − iΛu|, which decays without the e^{±it} carrier of u itself."""
    v = velocities(state, params)[component]
    return state.fhat[component].with_values(v, tag=COMPLEX).sup_norm(padding=1)


@invariant("solver", "small_data_decay", slow=True)
def small_data_decay(context: VerifyContext) -> dict:
    """u² system from ε = 1e−3 Gaussian data of width 4.4 on 64³, box 128, up to t = 100."""
    params = build_system(SMALL_DATA)
    eps = 1e-3
    traj = evolve(initial_state(params, 64, 128.0, eps, width=4.4), params, T=100.0, dt=0.25, output_dt=1.0)
    energies = np.array([r["E"] for r in traj.diagnostics])
    ratio = float(np.max(energies) / energies[0])
    times = np.array(traj.times)
    picked = [int(np.argmin(np.abs(times - t))) for t in FIT_TIMES]
    sups = np.array([half_wave_sup(traj.states[i], params) for i in picked])
    slope, ci, _ = fit_slope(times[picked], sups, (10.0, 100.0))
    trend = scattering_trend(traj, windows=3)
    decreasing = all(later < earlier for earlier, later in zip(trend, trend[1:]))
    passed = ratio <= 1 + 10 * eps and -1.2 <= slope <= -0.8 and decreasing
    return outcome(passed, {"energy_ratio": ratio, "slope": slope, "cauchy_windows": trend},
                   {"energy_ratio": 1 + 10 * eps, "slope": [-1.2, -0.8]}, slope_ci=ci)
