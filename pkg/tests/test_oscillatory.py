import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from models.system import PhaseTriple
from oscillatory.bilinear import angular_bilinear, radial_bilinear
from oscillatory.core import IbpParameters, ibp_bound, osc_integral, radimp_bound, special_choice_eps
from tools.errors import CostError, DomainError
from verify import oscillatory as oscillatory_checks


class TestIbpBound:

    def test_documented_value(self):
        assert ibp_bound(IbpParameters(K=1024, n=1, eps=(1.0,), lam=4.0))["M"] == 256

    @given(K=st.floats(min_value=1, max_value=1e6))
    @settings(max_examples=50, deadline=None)
    def test_unit_eps_and_lambda(self, K):
        assert ibp_bound(IbpParameters(K=K, n=1, eps=(1.0,), lam=1.0))["M"] == pytest.approx(K)

    @given(K=st.floats(min_value=1, max_value=1e6), eps=st.floats(min_value=1e-3, max_value=1.0),
           n=st.integers(min_value=1, max_value=5), lam=st.floats(min_value=1, max_value=100))
    @settings(max_examples=100, deadline=None)
    def test_special_choice(self, K, eps, n, lam):
        found = ibp_bound(IbpParameters(K=K, n=n, eps=special_choice_eps(eps, n), lam=lam))["M"]
        assert found == pytest.approx(min(K * eps ** ((n + 1) / n), K * eps / lam), rel=1e-12)

    def test_phase_derivative_scale_variant(self):
        plain = ibp_bound(IbpParameters(K=100, n=1, eps=(0.5,), lam=2.0))["M"]
        scaled = ibp_bound(IbpParameters(K=100, n=1, eps=(0.5,), lam=2.0, lam_prime=1.0))["M"]
        # λ' = 1 gives min(Kε², Kε/λ), which for n = 1 is the Kε·ε₁ chain
        assert scaled == pytest.approx(plain)
        assert ibp_bound(IbpParameters(K=100, n=1, eps=(0.5,), lam=2.0, lam_prime=4.0))["M"] < plain

    @pytest.mark.parametrize("kwargs", [
        dict(K=0.5, n=1, eps=(1.0,)),
        dict(K=10, n=2, eps=(1.0,)),
        dict(K=10, n=1, eps=(0.0,)),
        dict(K=10, n=1, eps=(1.0,), lam=0.5),
    ])
    def test_bad_inputs(self, kwargs):
        with pytest.raises(DomainError):
            ibp_bound(IbpParameters(**kwargs))

    def test_bound_decreases_with_M(self):
        small = ibp_bound(IbpParameters(K=10, n=1, eps=(1.0,)))
        large = ibp_bound(IbpParameters(K=1000, n=1, eps=(1.0,)))
        assert large["bound"] < small["bound"]


class TestRadialBound:

    def test_pattern(self):
        assert radimp_bound(2, 0, 0, 1.0) == pytest.approx(1.0)
        assert radimp_bound(2, 0, 0, 1e-4) == pytest.approx(1e-2)
        assert radimp_bound(0, 1, 1, 1.0) == pytest.approx(0.25)

    def test_positive_eps(self):
        with pytest.raises(DomainError):
            radimp_bound(0, 0, 0, 0.0)


class TestOscillatoryIntegral:

    def test_zero_amplitude(self):
        result = osc_integral(lambda x: x * x / 2, lambda x: 0.0 * x, 100.0, [(-4.0, 4.0)])
        assert result.value == 0

    def test_budget(self):
        with pytest.raises(CostError) as err:
            osc_integral(lambda x: x, lambda x: np.exp(-x * x), 1e9, [(-8.0, 8.0)], max_cells=1000)
        assert err.value.suggested_max_K < 1e9

    def test_only_one_or_three_dimensions(self):
        with pytest.raises(DomainError):
            osc_integral(lambda x, y: x, lambda x, y: 1.0, 10.0, [(0, 1), (0, 1)])

    def test_gaussian_integral_without_oscillation(self):
        result = osc_integral(lambda x: 0 * x, lambda x: np.exp(-x * x), 1.0, [(-8.0, 8.0)])
        assert result.value.real == pytest.approx(np.sqrt(np.pi), rel=1e-10)


class TestBilinear:

    def test_zero_factor(self):
        one = lambda r: np.ones_like(r)
        zero = lambda r: np.zeros_like(r)
        assert radial_bilinear(one, zero, 1.0, (0.0, 1.0), (0.0, 1.0)) == 0

    def test_output_magnitude_must_be_positive(self):
        one = lambda r: np.ones_like(r)
        with pytest.raises(DomainError):
            radial_bilinear(one, one, 0.0, (0.0, 1.0), (0.0, 1.0))

    def test_empty_band(self, single, gaussian):
        F = gaussian(n=8, box_length=8.0)
        G = gaussian(n=8, box_length=8.0)
        found = angular_bilinear(single, PhaseTriple(1, 1, 1), F, G, upsilon=30.0, kappa=0.0, t=0.5,
                                 xi=[0.3, 0.5, 0.8], n_phi=8, order=4)
        assert found["empty_band"]
        assert found["abs_value"] == 0.0


class TestInvariants:

    @pytest.mark.parametrize("check", [
        oscillatory_checks.ibp_bound_monotone,
        oscillatory_checks.oscillatory_integral_linear,
        oscillatory_checks.stationary_phase_oracle,
        oscillatory_checks.radial_reduction_volume,
        oscillatory_checks.angular_bilinear_rotation_invariant,
    ])
    def test_holds(self, context, check):
        assert check(context)["passed"]

    @pytest.mark.slow
    def test_radial_reduction_matches_lattice_convolution(self, context):
        found = oscillatory_checks.radial_reduction_convolution(context)
        assert found["passed"], found


class TestShellCells:

    def test_volume(self):
        cells = oscillatory_checks.shell_cells(64, 8.0, 1.0, 2.0)
        assert cells.sum() * (8.0 / 64) ** 3 == pytest.approx(4 / 3 * np.pi * 7, rel=1e-2)

    def test_fractions(self):
        cells = oscillatory_checks.shell_cells(16, 8.0, 1.0, 2.0)
        assert cells.min() == 0.0 and cells.max() == 1.0
        # the origin cell lies inside the hole
        assert cells[0, 0, 0] == 0.0
