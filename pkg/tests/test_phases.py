import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from models.system import PhaseTriple, build_system
from phases.core import eval_phase, parallel_phase, phase_derivatives
from phases.factor import expansion_at_Q_zero, factor_dbeta, tune_sigma
from phases.lowfreq import classify_low_freq
from phases.resonance import derivative_lower_bound, spacetime_resonances, sublevel_measure
from tools.errors import DomainError
from verify import phases as phase_checks

coordinate = st.floats(min_value=-5, max_value=5, allow_nan=False)
vector = st.tuples(coordinate, coordinate, coordinate)


class TestPhase:

    def test_values_at_the_origin(self, equal):
        assert eval_phase(equal, PhaseTriple(1, 1, 1), np.zeros(3), np.zeros(3)) == pytest.approx(-1.0)
        assert eval_phase(equal, PhaseTriple(1, -1, 1), np.zeros(3), np.zeros(3)) == pytest.approx(1.0)

    @given(xi=vector)
    @settings(max_examples=100, deadline=None)
    def test_sphere_family_vanishes(self, sphere, xi):
        xi = np.array(xi)
        triple = PhaseTriple(1, 2, 3)
        assert abs(eval_phase(sphere, triple, xi, xi / 2)) <= 1e-12
        assert np.linalg.norm(phase_derivatives(sphere, triple, xi, xi / 2)["grad_eta"]) <= 1e-10

    def test_gradient_vanishes_at_origin(self, equal):
        grad = phase_derivatives(equal, PhaseTriple(1, 1, 1), np.zeros(3), np.zeros(3))["grad_eta"]
        assert np.allclose(grad, 0.0)

    @given(xi=vector, eta=vector)
    @settings(max_examples=50, deadline=None)
    def test_sign_symmetry(self, mixed, xi, eta):
        triple = PhaseTriple(1, -2, 3)
        a = eval_phase(mixed, triple, np.array(xi), np.array(eta))
        b = eval_phase(mixed, triple.negated(), np.array(xi), np.array(eta))
        assert abs(a + b) <= 1e-12 * (1 + abs(a))

    def test_parallel_derivatives_at_origin(self, equal):
        values = parallel_phase(equal, PhaseTriple(1, 1, 1), 0.0, 0.0, 2)
        assert [float(v) for v in values] == pytest.approx([-1.0, 0.0, -2.0], abs=1e-15)

    @given(alpha=coordinate, beta=coordinate)
    @settings(max_examples=50, deadline=None)
    def test_parallel_matches_collinear_evaluation(self, mixed, alpha, beta):
        triple = PhaseTriple(2, 1, -3)
        e = np.array([0.0, 0.0, 1.0])
        assert parallel_phase(mixed, triple, alpha, beta, 0)[0] == pytest.approx(
            eval_phase(mixed, triple, alpha * e, beta * e), abs=1e-12)

    def test_order_limit(self, equal):
        with pytest.raises(ValueError):
            parallel_phase(equal, PhaseTriple(1, 1, 1), 0.0, 0.0, 5)


class TestResonances:

    def test_unequal_masses_are_empty(self, equal):
        assert spacetime_resonances(equal, PhaseTriple(1, 1, 1)).kind == "empty"

    def test_sphere_family(self, sphere):
        report = spacetime_resonances(sphere, PhaseTriple(1, 2, 3))
        assert report.kind == "sphere_family"
        assert report.rho == 0.5
        assert report.family_residuals["max_phi"] <= 1e-12
        assert report.to_dict()["kind"] == "sphere_family"

    def test_time_nonresonant_mixed_speeds(self, mixed):
        # √(α²+1) < √((α−β)²+1) + √(4β²+1) everywhere
        report = spacetime_resonances(mixed, PhaseTriple(1, 1, 3), grid=201)
        assert report.kind == "empty"
        assert report.grid == 201

    def test_found_pairs_are_resonant(self):
        params = build_system({"d": 2, "b": [0.1, 2.0], "c": [1.0, 2.0]})
        report = spacetime_resonances(params, PhaseTriple(1, 1, -2), grid=401)
        for p in report.pairs:
            assert abs(p.phi_residual) <= 1e-10
            assert abs(p.dbeta_residual) <= 1e-10

    def test_sublevel_set_empty(self, equal):
        assert sublevel_measure(equal, PhaseTriple(1, 1, 1), 0.0, 0.3, (-3.0, 3.0)) == 0.0

    def test_sublevel_closed_form(self, sphere):
        eps = 0.01
        measure = sublevel_measure(sphere, PhaseTriple(1, 2, 3), 0.0, eps, (-3.0, 3.0))
        assert measure == pytest.approx(2 * np.sqrt((1 + eps / 2) ** 2 - 1), rel=1e-8)

    def test_lower_bound_is_positive(self):
        params = build_system({"d": 2, "b": [0.1, 2.0], "c": [1.0, 2.0]})
        found = derivative_lower_bound(params, PhaseTriple(1, 1, -2), ((-5, 5), (-5, 5)), samples=101)
        assert found["constant"] > 0


class TestFactorization:

    def test_equal_speeds_reduce(self, sphere):
        fac = factor_dbeta(sphere, PhaseTriple(1, 2, 3))
        assert fac.reduced
        assert fac.rho == pytest.approx(0.5)
        assert fac.summary()["root"] == "beta = rho * alpha"
        assert fac.R1(2.0) == pytest.approx(1.0)


class TestLowFrequency:

    def test_taylor_coefficients(self, single):
        report = classify_low_freq(single, PhaseTriple(1, 1, 1))
        assert report.sigma_coeffs["sigma_1_0"] == pytest.approx(0.5)
        assert report.sigma_coeffs["sigma_2_0"] == pytest.approx(0.125)
        assert report.case_label == "nondegenerate"

    def test_case_B(self, sphere):
        report = classify_low_freq(sphere, PhaseTriple(1, 2, 3))
        assert report.perfect_square
        assert report.case_label == "B"
        assert report.rho5 == pytest.approx(0.5)

    def test_case_A(self):
        # b₃ = b₁ + b₂ and b₁/c₁² + b₂/c₂² = b₃/c₃²
        params = build_system({"d": 3, "b": [1.0, 1.0, 2.0], "c": [1.0, 2.0, float(np.sqrt(1.6))]})
        report = classify_low_freq(params, PhaseTriple(1, -2, 3))
        assert report.perfect_square
        assert report.case_label == "A"
        assert report.caseA_lambda != 0
        assert report.caseA_rho7 is not None


class TestInvariants:

    @pytest.mark.parametrize("check", [
        phase_checks.sign_symmetry,
        phase_checks.exchange_identity,
        phase_checks.derivatives_match_differences,
        phase_checks.sphere_family_exact,
    ])
    def test_holds(self, context, check):
        assert check(context)["passed"]


class TestQZero:

    def test_sigma_must_be_its_own_component(self):
        params = build_system({"d": 2, "b": [0.1, 2.0], "c": [1.0, 2.0]})
        with pytest.raises(DomainError):
            tune_sigma(params, PhaseTriple(1, 1, -2), 0.5)

    def test_equal_speeds_have_no_Q(self, sphere):
        with pytest.raises(DomainError):
            expansion_at_Q_zero(sphere, PhaseTriple(1, 2, 3), 0.5)
