import numpy as np
import pytest

from models.field import SpectralField
from models.system import PhaseTriple, build_system
from solver.core import diagonalize, duhamel_rhs, invert, multiplier_envelope, multiplier_m
from solver.energy import symmetrized_energy
from solver.evolve import (evolve, gaussian_data, initial_state, order_check, scattering_check, scattering_trend)
from tools.errors import AliasingError, DomainError, InstabilityError
from verify import solver as solver_checks


class TestDiagonalize:

    def test_zero_data(self, single):
        zero = [SpectralField.zeros(8, 8.0, component=1)]
        state = diagonalize(zero, zero, single)
        assert sorted(state.fhat) == [-1, 1]
        assert state.norm() == 0.0

    def test_invert_recovers_the_data(self, mixed):
        g, h = gaussian_data(mixed, 16, 16.0, 0.5)
        h = [w.with_values(0.3 * w.values) for w in g]
        u, du = invert(diagonalize(g, h, mixed), mixed)
        for a in range(mixed.d):
            assert (u[a] - g[a]).l2_norm() <= 1e-13 * g[a].l2_norm()
            assert (du[a] - h[a]).l2_norm() <= 1e-13 * h[a].l2_norm()

    def test_real_data_is_conjugation_symmetric(self, single):
        g, h = gaussian_data(single, 16, 16.0, 0.5)
        assert diagonalize(g, h, single).conjugation_drift() <= 1e-14

    def test_component_count(self, mixed):
        g, h = gaussian_data(build_system({"d": 1, "b": [1.0], "c": [1.0]}), 8, 8.0, 0.1)
        with pytest.raises(DomainError):
            diagonalize(g, h, mixed)


class TestMultiplier:

    def test_no_coefficients(self, single):
        assert multiplier_m(single, PhaseTriple(1, 1, 1), np.zeros(3), np.zeros(3)) == 0

    def test_value_at_the_origin(self):
        params = build_system({"d": 2, "b": [1.0, 2.0], "c": [1.0, 1.0], "Qprime": [[1, 1, 2, 0, 0, 1.0]]})
        # (i/2b₁)(i/2b₂)
        m = multiplier_m(params, PhaseTriple(1, 1, 2), np.zeros(3), np.zeros(3))
        assert abs(m) == pytest.approx(0.125)
        assert m.real == pytest.approx(-0.125)

    def test_broadcasts_over_points(self, semilinear):
        xi = np.random.default_rng(0).normal(size=(5, 3))
        assert multiplier_m(semilinear, PhaseTriple(1, 1, 1), xi, xi / 2).shape == (5,)

    def test_envelope_of_a_mass_term(self, semilinear):
        found = multiplier_envelope(semilinear, PhaseTriple(1, 1, 1), ks=[0, 1], samples=50)
        assert sorted(found["shells"]) == ["0,0", "0,1", "1,0", "1,1"]
        # |m| ≤ 1/(4b²) with b = 1
        assert 0 < found["max"] <= 0.25


class TestDuhamel:

    def test_zero_state(self, semilinear):
        zero = [SpectralField.zeros(8, 8.0, component=1)]
        rhs = duhamel_rhs(diagonalize(zero, zero, semilinear), semilinear)
        assert all(not np.any(f.values) for f in rhs.values())

    def test_free_system_has_no_forcing(self, single):
        rhs = duhamel_rhs(initial_state(single, 8, 8.0, 0.5), single)
        assert all(not np.any(f.values) for f in rhs.values())

    def test_undealiased_data(self, semilinear, gaussian):
        g = gaussian(n=8, box_length=4.0, width=0.3)
        state = diagonalize([g], [g.scaled(0.0)], semilinear)
        with pytest.raises(AliasingError):
            duhamel_rhs(state, semilinear)


class TestEnergy:

    def test_zero_fields(self, single):
        zero = [SpectralField.zeros(8, 8.0)]
        assert symmetrized_energy(zero, zero, single) == 0.0

    def test_order_cap(self, single):
        zero = [SpectralField.zeros(8, 8.0)]
        with pytest.raises(DomainError):
            symmetrized_energy(zero, zero, single, order=3)

    def test_mass_term(self, single, gaussian):
        u = [gaussian()]
        du = [SpectralField.zeros(16, 16.0)]
        energy = symmetrized_energy(u, du, single)
        assert energy > u[0].l2_norm() ** 2


class TestEvolve:

    def test_free_evolution_keeps_energy(self, single):
        traj = evolve(initial_state(single, 16, 16.0, 0.5), single, T=1.0, dt=0.1, output_dt=0.25)
        energies = [r["E"] for r in traj.diagnostics]
        assert len(traj.states) == 5
        assert max(abs(e - energies[0]) for e in energies) <= 1e-12 * energies[0]

    def test_free_profiles_scatter_at_once(self, single):
        traj = evolve(initial_state(single, 16, 16.0, 0.5), single, T=1.0, dt=0.1, output_dt=0.25)
        assert scattering_check(traj) <= 1e-14
        assert scattering_trend(traj, windows=2) == pytest.approx([0.0, 0.0], abs=1e-14)

    def test_unknown_scheme(self, single):
        with pytest.raises(DomainError):
            evolve(initial_state(single, 8, 8.0, 0.1), single, T=1.0, dt=0.1, scheme="euler")

    def test_output_step_must_divide(self, single):
        with pytest.raises(DomainError):
            evolve(initial_state(single, 8, 8.0, 0.1), single, T=1.0, dt=0.3)

    def test_instability_keeps_the_trajectory(self, single):
        with pytest.raises(InstabilityError) as err:
            evolve(initial_state(single, 8, 8.0, 0.1), single, T=1.0, dt=0.1, blowup=0.5)
        assert err.value.last_stable_time == 0.0
        assert len(err.value.trajectory.states) == 1

    @pytest.mark.slow
    def test_midpoint_is_second_order(self, semilinear):
        found = order_check(initial_state(semilinear, 16, 16.0, 0.5), semilinear, T=0.2, dt=0.05,
                            scheme="exponential_midpoint")
        assert 1.8 <= found["order"] <= 2.3

    def test_midpoint_keeps_free_profiles(self, single):
        initial = initial_state(single, 8, 8.0, 0.1)
        traj = evolve(initial, single, T=1.0, dt=0.25, scheme="exponential_midpoint")
        assert traj.meta["scheme"] == "exponential_midpoint"
        assert traj.states[-1].distance(initial) <= 1e-14 * initial.norm()

    def test_too_few_tail_snapshots(self, single):
        traj = evolve(initial_state(single, 8, 8.0, 0.1), single, T=1.0, dt=0.5)
        with pytest.raises(DomainError):
            scattering_check(traj, tail_fraction=0.1)

    def test_csv(self, single, tmp_path):
        traj = evolve(initial_state(single, 8, 8.0, 0.1), single, T=1.0, dt=0.25, output_dt=0.5)
        lines = traj.write_csv(tmp_path / "trajectory.csv").read_text().splitlines()
        assert lines[0] == "t,E,L2,Linf_u,Linf_du,cauchy_defect,H_N,conjugation_drift"
        assert len(lines) == 1 + 3


class TestInvariants:

    @pytest.mark.parametrize("check", [
        solver_checks.free_profiles_constant,
        solver_checks.fields_stay_real,
        solver_checks.equation_residual,
    ])
    def test_holds(self, context, check):
        assert check(context)["passed"]

    @pytest.mark.slow
    @pytest.mark.parametrize("check", [
        solver_checks.rk4_order,
        solver_checks.energy_needs_symmetric_coefficients,
        solver_checks.small_data_decay,
    ])
    def test_slow(self, context, check):
        assert check(context)["passed"]
