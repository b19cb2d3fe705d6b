"""
Tests for the stress catalogue, heat fluxes, admissibility sampling and the
existence-hypothesis validator.
"""

from types import SimpleNamespace

import numpy as np
import pytest

from core import constitutive, nfunction as nfn
from core.constitutive import (
    AdmissibilitySpec,
    HeatFluxModel,
    Viscosity,
    beta_threshold,
    check_admissibility,
    estimate_coercivity_const,
    heat_flux,
    power_threshold,
    stress,
    validate_hypotheses,
)
from core.errors import InvalidInputError

ALL_KINDS = {
    "power-law": lambda: constitutive.power_law(2.2),
    "carreau": lambda: constitutive.carreau(2.5),
    "variable-exponent": lambda: constitutive.variable_exponent_law(2.2, 3.0),
    "anisotropic": lambda: constitutive.anisotropic_law([[2.2, 3.0], [3.0, 2.5]]),
}


@pytest.fixture
def admissibility_spec():
    """Admissibility sampling at the full 10^4 samples and pairs."""
    return AdmissibilitySpec(sample_count=10_000, pair_count=10_000, seed=11)


class TestStress:
    """Pointwise stress and heat flux."""

    def test_power_law_value(self):
        """Test S = |K|^(p-2) K for unit viscosity."""
        K = np.diag([3.0, 4.0])
        S = stress(constitutive.power_law(3.0), [0.0, 0.0], 1.0, 1.0, K)
        np.testing.assert_allclose(S, 5.0 * K)

    def test_zero_gradient(self):
        """Test S(0) = 0 for p > 2."""
        S = stress(constitutive.power_law(2.2), [0.0, 0.0], 1.0, 1.0, np.zeros((2, 2)))
        assert not np.any(S)

    def test_output_symmetric(self):
        """Test that the stress of a nonsymmetric input is symmetric."""
        S = stress(constitutive.carreau(2.5), [0.0, 0.0], 1.0, 1.0, np.array([[1.0, 2.0], [0.0, -1.0]]))
        np.testing.assert_allclose(S, S.T)

    def test_nonpositive_density(self):
        """Test that rho <= 0 raises InvalidInputError."""
        with pytest.raises(InvalidInputError):
            stress(constitutive.power_law(2.2), [0.0, 0.0], 0.0, 1.0, np.eye(2))

    def test_heat_flux_linear(self):
        """Test q = kappa theta^beta g."""
        heat = HeatFluxModel(kappa_low=2.0, kappa_high=2.0, beta=0.5)
        np.testing.assert_allclose(heat_flux(heat, 1.0, 4.0, [1.0, -1.0]), [4.0, -4.0])

    def test_heat_flux_singular_temperature(self):
        """Test that theta <= 0 with beta < 0 raises."""
        with pytest.raises(InvalidInputError):
            heat_flux(HeatFluxModel(beta=-0.2), 1.0, 0.0, [1.0, 0.0])

    def test_viscosity_clipping(self):
        """Test mu(rho, theta) stays inside [mu_low, mu_high]."""
        mu = Viscosity(mu0=1.0, a=1.0, b=1.0, mu_low=0.5, mu_high=2.0)
        values = mu(np.array([0.1, 1.0, 10.0]), np.array([10.0, 1.0, 0.1]))
        assert np.all(values >= 0.5) and np.all(values <= 2.0)
        assert values[-1] == 2.0

    def test_varying_viscosity_needs_bounds(self):
        """Test that a varying viscosity without bounds is rejected."""
        with pytest.raises(InvalidInputError):
            Viscosity(mu0=1.0, a=0.5)


class TestAdmissibility:
    """Sampled coercivity, monotonicity and heat-flux bounds."""

    @pytest.mark.parametrize("kind", sorted(ALL_KINDS))
    def test_built_ins_pass(self, kind, admissibility_spec):
        """Test that every built-in law passes all sampled checks."""
        report = check_admissibility(ALL_KINDS[kind](), HeatFluxModel(0.5, 2.0, 0.2), admissibility_spec)
        assert report.checks["monotonicity"].passed
        assert report.checks["coercivity"].passed
        assert report.checks["heat_lower"].passed
        assert report.checks["heat_upper"].passed

    def test_power_law_coercivity_identity(self, admissibility_spec):
        """Test S:K = M + M* exactly for the unit-viscosity power law."""
        report = check_admissibility(constitutive.power_law(2.2), HeatFluxModel(), admissibility_spec)
        assert report.coercivity_const == 1.0
        assert abs(report.checks["coercivity"].worst) < 1e-6

    def test_estimate_power_law(self, admissibility_spec):
        """Test that the sampled c_c of the power law is 1."""
        model = constitutive.power_law(2.5)
        assert estimate_coercivity_const(model, admissibility_spec) == pytest.approx(1.0, abs=1e-9)
        assert model.coercivity_const == pytest.approx(1.0, abs=1e-9)

    def test_varying_viscosity_constant(self, admissibility_spec):
        """Test that the analytic c_c for a viscosity contrast still passes."""
        mu = Viscosity(mu0=1.0, a=0.5, mu_low=1.0, mu_high=2.0)
        model = constitutive.power_law(2.5, viscosity=mu)
        assert 0 < model.coercivity_const < 1.0
        assert check_admissibility(model, HeatFluxModel(), admissibility_spec).checks["coercivity"].passed

    def test_report_rows(self, admissibility_spec):
        """Test the admissibility table layout."""
        rows = check_admissibility(constitutive.power_law(2.2), HeatFluxModel(), admissibility_spec).to_rows()
        assert [row["check"] for row in rows] == ["coercivity", "monotonicity", "heat_lower", "heat_upper"]
        assert set(rows[0]) == {"check", "passed", "worst", "witness"}


class TestHypotheses:
    """Existence-hypothesis validator."""

    def test_thresholds(self):
        """Test the power and beta thresholds."""
        assert str(power_threshold(3)) == "11/5"
        assert str(power_threshold(2)) == "2"
        assert beta_threshold(2.2) == pytest.approx(-1.6 / 3.6)
        assert beta_threshold(10.0) == pytest.approx(-2.0 / 3.0)

    def test_admissible_three_dimensional(self):
        """Test p = 2.2 in d = 3 passes."""
        verdict = validate_hypotheses(constitutive.power_law(2.2, 3), HeatFluxModel(), 3)
        assert verdict.get("power").passed
        assert verdict.passed

    def test_low_power_fails(self):
        """Test p = 2 in d = 3 fails with the 11/5 threshold in the detail."""
        verdict = validate_hypotheses(constitutive.power_law(2.0, 3), HeatFluxModel(), 3)
        power = verdict.get("power")
        assert not power.passed
        assert "11/5" in power.detail
        assert not verdict.passed

    @pytest.mark.parametrize("beta, expected", [(-0.5, False), (-0.4, True), (0.3, True)])
    def test_beta(self, beta, expected):
        """Test the beta lower bound at p = 2.2."""
        verdict = validate_hypotheses(constitutive.power_law(2.2), HeatFluxModel(beta=beta), 2)
        assert verdict.get("beta").passed is expected

    def test_data_bounds(self):
        """Test the density and temperature checks against the initial data."""
        data = SimpleNamespace(
            rho0=np.array([0.9, 1.1]), theta0=np.array([0.4, 1.0]), rho_low=0.8, rho_high=1.2, theta_low=0.5
        )
        verdict = validate_hypotheses(constitutive.power_law(2.2), HeatFluxModel(), 2, data)
        assert verdict.get("density_bounds").passed
        assert not verdict.get("temperature_floor").passed
        assert [c.name for c in verdict.failures] == ["temperature_floor"]

    def test_summary_lists_every_check(self):
        """Test that the summary mentions each check."""
        verdict = validate_hypotheses(constitutive.power_law(2.2), HeatFluxModel(), 2)
        for check in verdict.checks:
            assert check.name in verdict.summary()


class TestCustomLaw:
    """User-supplied stress laws."""

    def test_linear_law_estimates_unit_constant(self):
        """Test that S = K paired with |K|^2 / 2 gets c_c = 1."""
        model = constitutive.custom_law(lambda x, rho, theta, K: K, nfn.isotropic_power(2.0), name="newtonian")
        assert model.coercivity_const == pytest.approx(1.0, abs=1e-9)
        assert model.name == "newtonian"

    def test_given_constant_kept(self):
        """Test that an explicit c_c is not re-estimated."""
        model = constitutive.custom_law(lambda x, rho, theta, K: 2.0 * K, nfn.isotropic_power(2.0), coercivity_const=0.5)
        assert model.coercivity_const == 0.5
        np.testing.assert_allclose(stress(model, [0.0, 0.0], 1.0, 1.0, np.eye(2)), 2.0 * np.eye(2))
