"""
Tests for run configuration and the Galerkin time stepping.
"""

import numpy as np
import pytest

from core import constitutive
from core.errors import FatalDiagnosticError, InvalidInputError, StepRejectedError
from core.schema import RunStatus
from solver import DensityStepper, SimContext, TemperatureStepper, default_epsilon
from workflow import Simulation, run

from tests.scenarios import TAYLOR_GREEN, smoke, stokes


@pytest.fixture(scope="module")
def smoke_run():
    """Completed smoke trajectory."""
    return run(smoke())


class TestSimConfig:
    """Run configuration invariants."""

    def test_default_epsilon(self):
        """Test eps defaults to 1e-3 (2 pi / N)^2."""
        config = smoke()
        assert config.epsilon == pytest.approx(default_epsilon(16))
        assert config.epsilon_defaulted

    def test_nonpositive_dt(self):
        """Test that dt <= 0 is rejected."""
        with pytest.raises(InvalidInputError):
            smoke().with_updates(dt=0.0)

    def test_final_time_below_dt(self):
        """Test that T < dt is rejected."""
        with pytest.raises(InvalidInputError):
            smoke().with_updates(T=0.001)

    def test_dimension_mismatch(self):
        """Test that a 3-D stress model on a 2-D grid is rejected."""
        with pytest.raises(InvalidInputError):
            smoke().with_updates(stress=constitutive.power_law(2.2, 3))

    def test_last_step_lands_on_final_time(self):
        """Test the shortened final step."""
        config = smoke(time={"T": 0.1, "dt": 0.03})
        assert config.n_steps == 4
        assert config.step_size(0) == 0.03
        assert config.step_size(3) == pytest.approx(0.01)

    def test_point_refinement_resamples(self):
        """Test that a new point count resamples the data and resets the default eps."""
        config = smoke().with_updates(points=32)
        assert config.grid.points == 32
        assert config.initial_data.rho0.shape == (32, 32)
        assert config.epsilon == pytest.approx(default_epsilon(32))

    def test_initial_projection(self):
        """Test that the initial state reproduces the Taylor-Green data."""
        ctx = SimContext(smoke())
        state = ctx.initial_state()
        u = ctx.basis.synthesize_velocity(state.alpha)
        np.testing.assert_allclose(u, ctx.data.u0, atol=1e-12)
        assert state.t == 0.0


class TestTimeStepping:
    """Behaviour of complete runs."""

    def test_completes_with_cadence(self, smoke_run):
        """Test record count and final time of the smoke run."""
        assert smoke_run.status is RunStatus.COMPLETED
        assert len(smoke_run.records) == 11
        assert smoke_run.records[-1].t == pytest.approx(0.1)
        assert len(smoke_run.snapshots) == len(smoke_run.records)

    def test_mass_conserved(self, smoke_run):
        """Test int rho drifts by less than 1e-10."""
        masses = np.array([rec.mass for rec in smoke_run.records])
        assert np.max(np.abs(masses - masses[0])) < 1e-10

    def test_rest_state(self):
        """Test that zero velocity without forcing stays at rest."""
        trajectory = run(smoke(initial_data={"u0": ["0", "0"]}))
        assert not np.any(trajectory.final_state.alpha)
        assert trajectory.records[-1].kinetic_energy == 0.0

    def test_stokes_decay(self):
        """Test KE(T) = KE(0) exp(-|k|^2 T) for a unit shear mode with p = 2."""
        trajectory = run(stokes())
        ratio = trajectory.records[-1].kinetic_energy / trajectory.records[0].kinetic_energy
        assert ratio == pytest.approx(np.exp(-0.5), rel=1e-3)

    def test_stokes_coefficient_decay(self):
        """Test alpha decays at rate |k|^2 / 2."""
        trajectory = run(stokes())
        first, last = trajectory.snapshots[0].alpha, trajectory.final_state.alpha
        assert np.linalg.norm(last) / np.linalg.norm(first) == pytest.approx(np.exp(-0.25), rel=1e-3)

    def test_cadence_thins_records(self):
        """Test cadence 5 keeps t = 0, 0.05 and 0.1."""
        trajectory = run(smoke(time={"cadence": 5}))
        np.testing.assert_allclose(trajectory.times, [0.0, 0.05, 0.1])

    def test_cfl_rejection(self):
        """Test that an oversized step raises StepRejectedError at t = 0."""
        config = smoke(time={"T": 1.0, "dt": 0.5})
        with pytest.raises(StepRejectedError) as info:
            run(config)
        assert info.value.t == 0.0
        assert info.value.courant > info.value.limit

    def test_negative_density_is_fatal(self):
        """Test that a negative density breaks the mass matrix."""
        config = smoke(initial_data={"rho0": "-1", "u0": TAYLOR_GREEN})
        assert not config.verdict.get("density_bounds").passed
        with pytest.raises(FatalDiagnosticError):
            run(config)

    def test_step_keeps_shapes(self):
        """Test one split step returns fields of the input shapes."""
        sim = Simulation(smoke())
        state = sim.context.initial_state()
        new = sim.step(state, 0.01)
        assert new.t == pytest.approx(0.01)
        assert new.rho.shape == state.rho.shape
        assert new.alpha.shape == state.alpha.shape
        assert new.nu.shape == state.nu.shape


class TestSubsteps:
    """Single substeps against exact linear solutions."""

    AT_REST = {"u0": ["0", "0"]}

    def test_density_modes_decay_exactly(self):
        """Test frozen zero velocity leaves each density mode multiplied by exp(-eps |k|^2 dt)."""
        config = smoke(
            time={"epsilon": 0.5},
            initial_data={**self.AT_REST, "rho0": "1 + 0.1*sin(x1) + 0.05*cos(2*x2)"},
        )
        ctx = SimContext(config)
        state = ctx.initial_state()
        rho = DensityStepper(ctx).step(state, 0.01)
        x1, x2 = ctx.grid.coords
        expected = 1 + 0.1 * np.exp(-0.005) * np.sin(x1) + 0.05 * np.exp(-0.02) * np.cos(2 * x2)
        np.testing.assert_allclose(rho, expected, rtol=0, atol=1e-13)
        rho_hat, rho0_hat = ctx.grid.transform(rho), ctx.grid.transform(state.rho)
        decay = np.broadcast_to(np.exp(-0.5 * ctx.grid.k_squared * 0.01), rho_hat.shape)
        active = np.abs(rho0_hat) > 1e-8
        np.testing.assert_allclose(rho_hat[active] / rho0_hat[active], decay[active], rtol=1e-12)

    def test_constant_density_unchanged(self):
        """Test a constant density is a fixed point of the density step."""
        ctx = SimContext(smoke(time={"epsilon": 0.5}, initial_data={**self.AT_REST, "rho0": "1.1"}))
        state = ctx.initial_state()
        rho = DensityStepper(ctx).step(state, 0.01)
        np.testing.assert_allclose(rho, 1.1, rtol=0, atol=1e-14)

    @staticmethod
    def _heat_config(**changes):
        doc = {
            "basis": {"temperature_modes": 16},
            "heat": {"kappa_low": 0.5, "kappa_high": 0.5, "viscous_heating": False},
            "initial_data": {
                "rho0": "1",
                "u0": ["0", "0"],
                "theta0": "1 + 0.1*cos(x2) + 0.05*sin(x1 - x2)",
                "theta_low": 0.8,
            },
        }
        doc.update(changes)
        return smoke(**doc)

    def test_heat_step_factor(self):
        """Test one Heun temperature step multiplies each mode by 1 - z + z^2/2 with z = kappa0 |k|^2 dt."""
        ctx = SimContext(self._heat_config())
        state = ctx.initial_state()
        nu = TemperatureStepper(ctx).step(state, state.rho, state.alpha, 0.01)
        k2 = np.array([sum(c * c for c in mode.wavevector) for mode in ctx.basis.temperature_modes])
        z = 0.5 * k2 * 0.01
        np.testing.assert_allclose(nu, state.nu * (1.0 - z + 0.5 * z**2), rtol=1e-12, atol=1e-15)

    def test_heat_equation_decay(self):
        """Test theta(T) = 1 + 0.1 exp(-kappa0 T) cos(x2) + 0.05 exp(-2 kappa0 T) sin(x1 - x2) at rest."""
        trajectory = run(self._heat_config(time={"T": 0.1, "dt": 0.001}))
        ctx = trajectory.context
        theta = ctx.basis.synthesize_temperature(trajectory.final_state.nu)
        x1, x2 = ctx.grid.coords
        expected = 1 + 0.1 * np.exp(-0.05) * np.cos(x2) + 0.05 * np.exp(-0.1) * np.sin(x1 - x2)
        np.testing.assert_allclose(theta, expected, rtol=0, atol=1e-8)

    def test_constant_temperature_invariant(self):
        """Test a constant temperature stays constant without a heat source."""
        config = self._heat_config(initial_data={"rho0": "1", "u0": ["0", "0"], "theta0": "1.5"})
        trajectory = run(config)
        theta = trajectory.context.basis.synthesize_temperature(trajectory.final_state.nu)
        np.testing.assert_allclose(theta, 1.5, rtol=0, atol=1e-13)
