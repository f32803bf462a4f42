import numpy as np
from loguru import logger

from models.system import PhaseTriple, build_system
from phases.core import eval_phase, phase_derivatives
from phases.factor import expansion_at_Q_zero, factor_dbeta, reconstruction_residual, tune_sigma
from phases.resonance import derivative_lower_bound, family_gradient_ratio, family_residuals, \
    spacetime_resonances
from tools.errors import KgError
from verify.registry import VerifyContext, invariant, outcome, reference_system

MIXED_TRIPLE = PhaseTriple(1, 1, -2)
SPHERE_TRIPLE = PhaseTriple(1, 2, 3)


def _points(seed: int, count: int = 1000, radius: float = 5.0):
    rng = np.random.default_rng(seed)
    return rng.uniform(-radius, radius, (count, 3)), rng.uniform(-radius, radius, (count, 3))


def _triples(params):
    return [PhaseTriple(s, m, n) for s in params.indices[:2] for m in params.indices for n in params.indices[:2]]


@invariant("phases", "sign_symmetry")
def sign_symmetry(context: VerifyContext) -> dict:
    params = context.params
    xi, eta = _points(context.seed)
    worst = max(float(np.max(np.abs(eval_phase(params, t.negated(), xi, eta) + eval_phase(params, t, xi, eta))))
                for t in _triples(params))
    return outcome(worst <= 1e-12, worst, 1e-12)


@invariant("phases", "exchange_identity")
def exchange_identity(context: VerifyContext) -> dict:
    params = context.params
    xi, eta = _points(context.seed)
    worst = 0.0
    for t in _triples(params):
        a = eval_phase(params, t, xi, eta)
        b = eval_phase(params, t.swapped(), xi, xi - eta)
        worst = max(worst, float(np.max(np.abs(a - b) / (1 + np.abs(a)))))
    return outcome(worst <= 1e-10, worst, 1e-10)


@invariant("phases", "derivatives_match_differences")
def derivatives_match_differences(context: VerifyContext) -> dict:
    params = context.params
    xi, eta = _points(context.seed)
    h = 1e-6
    worst = 0.0
    for t in _triples(params)[:4]:
        exact = phase_derivatives(params, t, xi, eta)
        for axis in range(3):
            step = np.zeros(3)
            step[axis] = h
            numeric = {
                "grad_eta": (eval_phase(params, t, xi, eta + step) - eval_phase(params, t, xi, eta - step)) / (2 * h),
                "grad_xi": (eval_phase(params, t, xi + step, eta) - eval_phase(params, t, xi - step, eta)) / (2 * h),
            }
            for key, values in numeric.items():
                ref = exact[key][:, axis]
                worst = max(worst, float(np.max(np.abs(values - ref) / np.maximum(1.0, np.abs(ref)))))
            hess = (phase_derivatives(params, t, xi, eta + step)["grad_eta"]
                    - phase_derivatives(params, t, xi, eta - step)["grad_eta"]) / (2 * h)
            ref = exact["hess_eta"][:, :, axis]
            worst = max(worst, float(np.max(np.abs(hess - ref) / np.maximum(1.0, np.abs(ref)))))
    return outcome(worst <= 1e-6, worst, 1e-6, step=h, points=len(xi))


@invariant("phases", "factorization_reconstruction")
def factorization_reconstruction(context: VerifyContext) -> dict:
    params = reference_system("mixed")
    fac = factor_dbeta(params, MIXED_TRIPLE, (-5.0, 5.0), 401)
    residual = reconstruction_residual(params, MIXED_TRIPLE, fac, np.linspace(-4.9, 4.9, 200),
                                       np.linspace(-5.0, 5.0, 200))
    simple = all(abs(s) > 0 for s in fac.Q_slopes)
    passed = residual["max_relative"] <= 1e-8 and simple
    return outcome(passed, residual["max_relative"], 1e-8, checked=residual["checked"], Q_zeros=fac.Q_zeros,
                   Q_slopes=fac.Q_slopes, triple=MIXED_TRIPLE.as_list())


@invariant("phases", "sphere_family_exact")
def sphere_family_exact(context: VerifyContext) -> dict:
    params = reference_system("sphere")
    report = spacetime_resonances(params, SPHERE_TRIPLE)
    res = family_residuals(params, SPHERE_TRIPLE, report.rho, samples=100, radius=10.0, seed=context.seed)
    empty = spacetime_resonances(reference_system("no_sphere"), SPHERE_TRIPLE).kind
    passed = (report.kind == "sphere_family" and res["max_phi"] <= 1e-12 and res["max_grad_eta"] <= 1e-10
              and empty == "empty")
    return outcome(passed, {"phi": res["max_phi"], "grad_eta": res["max_grad_eta"]},
                   {"phi": 1e-12, "grad_eta": 1e-10}, rho=report.rho, unequal_masses_kind=empty)


@invariant("phases", "parallel_derivatives_bounded_below")
def parallel_derivatives_bounded_below(context: VerifyContext) -> dict:
    params = reference_system("mixed")
    box = ((-5.0, 5.0), (-5.0, 5.0))
    full = derivative_lower_bound(params, MIXED_TRIPLE, box, samples=201, max_order=3)
    low = derivative_lower_bound(params, MIXED_TRIPLE, box, samples=201, max_order=2, restrict_below=0.25)
    passed = full["constant"] > 0 and (low["constant"] is None or low["constant"] > 0)
    return outcome(passed, full["constant"], 0.0, low_frequency_order_two=low["constant"])


@invariant("phases", "sphere_gradient_uniform")
def sphere_gradient_uniform(context: VerifyContext) -> dict:
    params = reference_system("sphere")
    ratios = [family_gradient_ratio(params, SPHERE_TRIPLE, k, seed=context.seed) for k in range(3, 9)]
    C = max(max(r["max"] for r in ratios), 1 / min(r["min"] for r in ratios))
    return outcome(np.isfinite(C) and C < 1e3, C, 1e3, per_k={str(r["k"]): [r["min"], r["max"]] for r in ratios})


# (μ, ν) pairs of the mixed system tried in turn for a simple zero of Q
Q_ZERO_PAIRS = ((1, -2), (-1, 2), (1, 2), (2, -1), (1, -1))


def _tuned_instance(params, mu: int, nu: int, match_derivative: bool):
    try:
        fac = factor_dbeta(params, PhaseTriple(3, mu, nu), (-5.0, 5.0), 401)
    except KgError as e:
        logger.debug(f"Cannot factor ({mu}, {nu}): {e.message}")
        return None
    for alpha0 in fac.Q_zeros:
        for sigma in (3, -3):
            triple = PhaseTriple(sigma, mu, nu)
            try:
                return triple, alpha0, tune_sigma(params, triple, alpha0, match_derivative)
            except KgError as e:
                logger.debug(f"No tuned instance for {triple} at alpha0={alpha0:.6g}: {e.message}")
    return None


@invariant("phases", "q_zero_expansion", slow=True)
def q_zero_expansion(context: VerifyContext) -> dict:
    """|α−α₀|^{3/2} defect next to a resonant zero of Q, and |α−α₀|^{1/2} growth when λ = 0."""
    mixed = reference_system("mixed")
    params = build_system({"d": 3, "b": list(mixed.b) + [1.0], "c": list(mixed.c) + [1.0]})
    found = {}
    for match_derivative, key in ((False, "generic"), (True, "lambda_zero")):
        for mu, nu in Q_ZERO_PAIRS:
            instance = _tuned_instance(params, mu, nu, match_derivative)
            if instance is None:
                continue
            triple, alpha0, tuned = instance
            found[key] = {"triple": triple.as_list(), **expansion_at_Q_zero(tuned, triple, alpha0)}
            break
    if "generic" not in found:
        return outcome(False, None, [1.45, 1.55], note="no resonant zero of Q found")
    generic = found["generic"]["fit_exponent"]
    passed = 1.45 <= generic <= 1.55
    sides = [found["generic"]["lambda_prime_left"], found["generic"]["lambda_prime_right"]]
    passed = passed and all(abs(s) > 0 for s in sides)
    if "lambda_zero" in found:
        growth = found["lambda_zero"].get("derivative_exponent")
        passed = passed and growth is not None and 0.45 <= growth <= 0.55
    return outcome(passed, generic, [1.45, 1.55], instances=found)
