import numpy as np

from config import defaults
from models.reports import DegenerateReport
from models.system import SystemParams, PhaseTriple
from phases.core import eval_phase


def taylor_coefficients(params: SystemParams, triple: PhaseTriple) -> dict:
    """σ_{1,β} and σ_{2,β}; signed masses carry the sign of each index."""
    out = {}
    for beta, s, sign in ((0, triple.sigma, 1), (1, triple.mu, -1), (2, triple.nu, -1)):
        b, c = params.mass(s), params.speed(s)
        out[f"sigma_1_{beta}"] = sign * c ** 2 / (2 * b)
        out[f"sigma_2_{beta}"] = sign * c ** 4 / (8 * b ** 3)
    return out


def measured_quartic(params: SystemParams, triple: PhaseTriple, rho: float, radii=(2e-2, 1e-2)) -> float:
    """lim Φ(ξ, ρξ)/|ξ|⁴ as |ξ| → 0, one Richardson step against the |ξ|⁶ term."""
    e = np.array([0.0, 0.0, 1.0])
    r1, r2 = radii
    q1 = eval_phase(params, triple, r1 * e, rho * r1 * e) / r1 ** 4
    q2 = eval_phase(params, triple, r2 * e, rho * r2 * e) / r2 ** 4
    return float((q2 * r1 ** 2 - q1 * r2 ** 2) / (r1 ** 2 - r2 ** 2))


def classify_low_freq(params: SystemParams, triple: PhaseTriple, tol: float = None) -> DegenerateReport:
    triple.check(params.d)
    tol = defaults["condition_tol"] if tol is None else tol
    sig = taylor_coefficients(params, triple)
    s10, s11, s12 = sig["sigma_1_0"], sig["sigma_1_1"], sig["sigma_1_2"]
    quad = {"rho0": s10 + s11, "rho1": -2 * s11, "rho3": s11 + s12}
    bs, bm, bn = params.mass(triple.sigma), params.mass(triple.mu), params.mass(triple.nu)
    cs, cm, cn = params.speed(triple.sigma), params.speed(triple.mu), params.speed(triple.nu)
    second = bs / cs ** 2 - bm / cm ** 2 - bn / cn ** 2
    perfect = abs(second) <= tol
    phi0 = bs - bm - bn
    report = DegenerateReport(triple=triple.as_list(), sigma_coeffs=sig, quad_coeffs=quad,
                              perfect_square=perfect, second_residual=float(second), rho5=None,
                              caseA_lambda=None, case_label="nondegenerate", phi_at_origin=float(abs(phi0)),
                              tol=tol)
    if abs(phi0) > tol or not perfect:
        return report
    report.rho5 = float(-quad["rho1"] / (2 * quad["rho3"])) if quad["rho3"] != 0 else None
    if cs == cm == cn:
        report.case_label = "B"
        report.rho5 = bn / bs
        return report
    if len({cs, cm, cn}) == 3:
        report.case_label = "A"
        report.caseA_lambda = float(-(cs * cm * cn) ** 4 * (cs ** 2 - cm ** 2) * (cm ** 2 - cn ** 2)
                                    * (cn ** 2 - cs ** 2))
        report.caseA_rho7 = float((cs ** 2 - cm ** 2) / (cn ** 2 - cm ** 2))
        report.caseA_measured_quartic = measured_quartic(params, triple, report.caseA_rho7)
    return report
