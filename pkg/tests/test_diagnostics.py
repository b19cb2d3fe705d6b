"""
Tests for the record stream, the balance reports, the bounds report and the
time-shift seminorm.
"""

import math

import numpy as np
import pytest

from core.errors import InvalidInputError
from diagnostics import (
    bounds_report,
    energy_report,
    nikolskii_profile,
    nikolskii_seminorm,
    records_rows,
    summary_lines,
    thermal_report,
)
from diagnostics.nikolskii import default_multiples
from diagnostics.thermal import thermal_exponents
from workflow import run

from tests.scenarios import advection, canonical, forced, heat_decay, smoke, stokes

LINEAR = {"stress": {"kind": "power-law", "p": 2.0}}


@pytest.fixture(scope="module")
def smoke_run():
    """Completed smoke trajectory."""
    return run(smoke())


@pytest.fixture(scope="module")
def canonical_run():
    """Carreau smoke trajectory with n = k = 16."""
    return run(canonical())


@pytest.fixture(scope="module")
def canonical_run_n8():
    """Carreau smoke trajectory with n = 8 velocity modes."""
    return run(canonical(basis={"velocity_modes": 8}))


@pytest.fixture(scope="module")
def advection_runs():
    """Steep-bump advection at N = 32 and N = 64."""
    return run(advection(32)), run(advection(64))


class TestRecords:
    """Per-record quantities."""

    def test_initial_record(self, smoke_run):
        """Test the t = 0 record against the initial data."""
        first = smoke_run.records[0]
        ctx = smoke_run.context
        assert first.t == 0.0
        assert first.energy_residual == 0.0
        assert first.mass == pytest.approx(float(ctx.grid.integrate(ctx.data.rho0)), rel=1e-14)
        assert first.rho_min == pytest.approx(0.8)
        assert first.kinetic_energy > 0

    def test_dissipation_positive(self, smoke_run):
        """Test (S, Du) > 0 while the flow moves."""
        assert all(rec.dissipation > 0 for rec in smoke_run.records)

    def test_coercivity_margin(self, smoke_run):
        """Test S:Du - c_c (M + M*) stays nonnegative up to rounding."""
        assert min(rec.coercivity_margin for rec in smoke_run.records) > -1e-10

    def test_luxemburg_stride(self, smoke_run):
        """Test the window norms are filled every fifth record only."""
        filled = [i for i, rec in enumerate(smoke_run.records) if not math.isnan(rec.lux_norm_du)]
        assert filled == [4, 9]
        assert all(smoke_run.records[i].lux_norm_s > 0 for i in filled)


class TestEnergyReport:
    """Kinetic-energy balance."""

    def test_residual_second_order(self):
        """Test the balance residual shrinks about fourfold when dt halves."""
        coarse = energy_report(run(forced(1e-3, **LINEAR))).energy_residual
        fine = energy_report(run(forced(5e-4, **LINEAR))).energy_residual
        assert fine > 0
        assert coarse / fine >= 3.0

    def test_forcing_does_work(self):
        """Test that forcing from rest injects energy."""
        trajectory = run(forced(1e-2, **LINEAR))
        assert trajectory.records[0].kinetic_energy == 0.0
        assert trajectory.records[-1].kinetic_energy > 0
        assert trajectory.records[-1].work > 0

    def test_report_fields(self, smoke_run):
        """Test the bound quantities and exponents."""
        report = energy_report(smoke_run)
        assert report.exponent_p == pytest.approx(2.2)
        assert report.exponent_r == pytest.approx(5.0 * 2.2 / 3.0)
        assert report.dashboard >= smoke_run.records[0].kinetic_energy
        assert report.energy_residual < 1e-2 * smoke_run.records[0].kinetic_energy
        assert report.window_start == 0.0 and report.window_end == pytest.approx(0.1)

    def test_window(self, smoke_run):
        """Test a sub-window and an empty window."""
        report = energy_report(smoke_run, window=(0.05, 0.1))
        assert report.window_start == pytest.approx(0.05)
        with pytest.raises(InvalidInputError):
            energy_report(smoke_run, window=(0.1, 0.05))

    def test_dashboard_stable_in_modes(self, canonical_run_n8, canonical_run):
        """Test the Carreau smoke dashboard changes by less than 10% from n = 8 to n = 16."""
        coarse = energy_report(canonical_run_n8).dashboard
        fine = energy_report(canonical_run).dashboard
        assert abs(fine - coarse) / coarse < 0.1


class TestThermalReport:
    """Thermal balance and temperature bounds."""

    def test_balance_residual(self):
        """Test d/dt int rho theta = int S:Du at constant density."""
        report = thermal_report(run(heat_decay()))
        assert report.balance_residual < 1e-8
        assert report.thermal_increment > 0

    def test_increments_nonnegative(self):
        """Test int rho theta never decreases when rho is constant."""
        report = thermal_report(run(heat_decay()))
        assert report.min_step_increment >= -1e-10

    def test_no_heating(self):
        """Test int rho theta is conserved without viscous heating."""
        report = thermal_report(run(heat_decay(heat={"viscous_heating": False})))
        assert abs(report.thermal_increment) < 1e-10

    def test_exponents(self):
        """Test e = (beta - lambda + 1) / 2 and the s, m exponents."""
        e, s, m = thermal_exponents(0.0, 0.5)
        assert e == pytest.approx(0.25)
        assert s < 5.0 / 3.0
        assert 1.0 < m < 1.25

    def test_lambda_range(self, smoke_run):
        """Test that lambda outside (0, 1) is rejected."""
        with pytest.raises(InvalidInputError):
            thermal_report(smoke_run, thermal_lambda=1.0)


class TestBoundsReport:
    """Density bounds, temperature floor and mass drift."""

    def test_smoke_passes(self, smoke_run):
        """Test every bound check on the smoke run."""
        report = bounds_report(smoke_run)
        assert report.passed
        assert report.theta_min >= 0.99 * 0.9
        assert len(report.rows) == len(smoke_run.records)

    def test_canonical_smoke_passes(self, canonical_run):
        """Test the Carreau smoke run reaches T = 1 with every bound check passing."""
        report = bounds_report(canonical_run)
        assert canonical_run.records[-1].t == pytest.approx(1.0)
        assert report.passed
        assert report.summary["mass_drift"] < 1e-10

    def test_overshoot_shrinks_with_resolution(self, advection_runs):
        """Test density overshoot is under 1% of the gap at N = 32 and strictly smaller at N = 64."""
        coarse, fine = (bounds_report(t) for t in advection_runs)
        gap = 1.2 - 0.8
        assert coarse.worst_overshoot < 0.01 * gap
        assert fine.worst_overshoot < coarse.worst_overshoot

    def test_temperature_floor_under_refinement(self, advection_runs):
        """Test min theta >= 0.99 theta_low at N = 32 and N = 64 and no growth of the undershoot."""
        theta_low = 0.9
        coarse, fine = (bounds_report(t) for t in advection_runs)
        assert coarse.theta_min >= 0.99 * theta_low
        assert fine.theta_min >= 0.99 * theta_low
        coarse_gap = max(0.0, theta_low - coarse.theta_min)
        fine_gap = max(0.0, theta_low - fine.theta_min)
        # rounding of the t = 0 synthesis only
        assert fine_gap <= coarse_gap + 1e-14


class TestNikolskii:
    """Time-shift seminorm."""

    def test_default_multiples(self):
        """Test 1, 2, 4 ... up to half the intervals."""
        assert default_multiples(10) == [1, 2, 4]
        assert default_multiples(1) == [1]

    def test_profile(self, smoke_run):
        """Test shifts and positive quotients."""
        profile = nikolskii_profile(smoke_run, [0.01, 0.02])
        assert [d for d, _ in profile] == pytest.approx([0.01, 0.02])
        assert all(v > 0 for _, v in profile)

    def test_off_lattice_shift(self, smoke_run):
        """Test that a shift off the output lattice is rejected."""
        with pytest.raises(InvalidInputError):
            nikolskii_seminorm(smoke_run, [0.015])

    def test_exponential_decay_closed_form(self):
        """Test u(t) = exp(-t/2) u0 against the closed-form shifted-difference integral."""
        trajectory = run(stokes(time={"dt": 1e-3}))
        rate, T = 0.5, 0.5
        norm0 = np.linalg.norm(trajectory.snapshots[0].alpha)
        for delta, value in nikolskii_profile(trajectory, [0.01, 0.1, 0.25]):
            integral = (1.0 - np.exp(-2.0 * rate * (T - delta))) / (2.0 * rate)
            expected = norm0 * (1.0 - np.exp(-rate * delta)) * np.sqrt(integral / delta)
            assert value == pytest.approx(expected, rel=1e-2)

    def test_stable_in_modes(self, canonical_run_n8, canonical_run):
        """Test the Carreau smoke seminorm changes by less than 15% from n = 8 to n = 16."""
        coarse = nikolskii_seminorm(canonical_run_n8)
        fine = nikolskii_seminorm(canonical_run)
        assert abs(fine - coarse) / coarse < 0.15


class TestExport:
    """Tabular views and the summary."""

    def test_records_rows(self, smoke_run):
        """Test one row per record plus the summary footer."""
        rows = records_rows(smoke_run)
        assert len(rows) == len(smoke_run.records) + 1
        assert rows[0]["row"] == "record 0"
        footer = rows[-1]
        assert footer["row"] == "summary"
        assert footer["rho_min"] == min(rec.rho_min for rec in smoke_run.records)
        assert footer["t"] == smoke_run.records[-1].t

    def test_summary_lines(self, smoke_run):
        """Test key=value lines for the run and its reports."""
        lines = summary_lines(smoke_run, bounds=bounds_report(smoke_run), nikolskii=1.5)
        assert "run.status=completed" in lines
        assert "bounds.passed=true" in lines
        assert "nikolskii.seminorm=1.5" in lines
        assert all("=" in line for line in lines)
