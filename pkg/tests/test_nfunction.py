"""
Tests for N-function evaluation, conjugation and the sampled axiom checks.
"""

import numpy as np
import pytest

from core import nfunction as nfn
from core.errors import InvalidInputError
from core.nfunction import (
    ConjugateParams,
    SampleSpec,
    check_axioms,
    conjugate,
    conjugate_field,
    conjugate_table,
    conjugate_value,
    contract,
    evaluate,
    fenchel_young_gap,
    fenchel_young_gap_field,
    frobenius,
    random_symmetric_directions,
)
from core.schema import Delta2Verdict


@pytest.fixture
def rng():
    """Seeded generator."""
    return np.random.default_rng(1234)


def _points(rng, count, dim=2):
    return rng.uniform(0.0, 2.0 * np.pi, (count, dim))


def _matrices(rng, count, dim=2, r_max=3.0):
    return random_symmetric_directions(rng, count, dim) * rng.uniform(0.0, r_max, count)[:, None, None]


class TestEvaluate:
    """Pointwise evaluation."""

    def test_quadratic_identity(self):
        """Test |I|^2 / 2 = 1 for the 2x2 identity."""
        assert evaluate(nfn.isotropic_power(2.0), [0.0, 0.0], np.eye(2)) == pytest.approx(1.0, abs=1e-15)

    def test_zero_matrix(self):
        """Test M(x, 0) = 0 for every built-in kind."""
        for nf in (
            nfn.isotropic_power(2.5),
            nfn.carreau(2.2),
            nfn.variable_exponent(2.0, 3.0),
            nfn.anisotropic_separable([[2.0, 3.0], [3.0, 2.5]]),
            nfn.exponential(),
        ):
            assert evaluate(nf, [1.0, 2.0], np.zeros((2, 2))) == 0.0

    def test_underflow_stays_positive(self):
        """Test a tiny nonzero K with a large exponent gives the smallest positive float, not 0."""
        value = evaluate(nfn.isotropic_power(50.0), [0.0, 0.0], 1e-10 * np.eye(2))
        assert value == np.finfo(float).tiny
        assert value > 0.0

    def test_variable_exponent_unit_radius(self):
        """Test p(x) = 2 + sin^2(x1) at x1 = 0 and |K| = 1 gives 1/2."""
        nf = nfn.variable_exponent(2.0, 3.0)
        K = np.diag([1.0, 0.0])
        assert evaluate(nf, [0.0, 0.7], K) == pytest.approx(0.5, abs=1e-15)

    def test_symmetrizes_input(self):
        """Test that the antisymmetric part of K is ignored."""
        nf = nfn.isotropic_power(2.0)
        K = np.array([[1.0, 2.0], [0.0, 1.0]])
        assert evaluate(nf, [0.0, 0.0], K) == pytest.approx(evaluate(nf, [0.0, 0.0], 0.5 * (K + K.T)))

    def test_non_finite_rejected(self):
        """Test that NaN entries raise InvalidInputError."""
        with pytest.raises(InvalidInputError):
            evaluate(nfn.isotropic_power(2.0), [0.0, 0.0], np.array([[np.nan, 0.0], [0.0, 1.0]]))

    def test_invalid_exponent(self):
        """Test that p <= 1 is rejected."""
        with pytest.raises(InvalidInputError):
            nfn.isotropic_power(1.0)


class TestConjugate:
    """Numerical Legendre-Fenchel conjugation."""

    @pytest.mark.parametrize("p", [2.0, 2.2, 3.0])
    def test_power_oracle(self, rng, p):
        """Test numerical M* against |L|^p' / p' on 100 random L."""
        nf = nfn.isotropic_power(p)
        q = p / (p - 1.0)
        xs = _points(rng, 100)
        Ls = _matrices(rng, 100, r_max=5.0)
        for x, L in zip(xs, Ls):
            exact = frobenius(L) ** q / q
            value = conjugate_value(nf, x, L)
            assert abs(value - exact) / (1.0 + exact) < 1e-6

    def test_cube_example(self):
        """Test M = |K|^3/3 at |L| = 1 gives 2/3."""
        L = np.diag([1.0, 0.0])
        assert conjugate_value(nfn.isotropic_power(3.0), [0.0, 0.0], L) == pytest.approx(2.0 / 3.0, abs=1e-6)

    def test_zero_argument(self):
        """Test M*(x, 0) = 0."""
        assert conjugate_value(nfn.carreau(2.5), [0.0, 0.0], np.zeros((2, 2))) == 0.0

    def test_variable_exponent_closed_form(self, rng):
        """Test the golden-section conjugate against the pointwise closed form."""
        nf = nfn.variable_exponent(2.0, 3.0)
        for x, L in zip(_points(rng, 20), _matrices(rng, 20)):
            exact = float(nf.closed_form_conjugate(x, L))
            assert abs(conjugate_value(nf, x, L) - exact) / (1.0 + exact) < 1e-6

    def test_anisotropic_entrywise_oracle(self, rng):
        """Test quasi-Newton ascent against the entrywise conjugate sum."""
        nf = nfn.anisotropic_separable([[2.0, 3.0], [3.0, 2.5]])
        for x, L in zip(_points(rng, 5), _matrices(rng, 5, r_max=2.0)):
            exact = float(nf.closed_form_conjugate(x, L))
            assert abs(conjugate_value(nf, x, L) - exact) / (1.0 + exact) < 1e-6

    def test_carreau_quadratic_case(self, rng):
        """Test the p = 2 Carreau function against its closed form |L|^2 / 2."""
        nf = nfn.carreau(2.0)
        for x, L in zip(_points(rng, 10), _matrices(rng, 10)):
            exact = frobenius(L) ** 2 / 2.0
            assert abs(conjugate_value(nf, x, L) - exact) / (1.0 + exact) < 1e-6

    def test_field_matches_pointwise(self, rng):
        """Test vectorized golden-section against the scalar routine."""
        nf = nfn.carreau(2.5)
        xs = _points(rng, 30)
        Ls = _matrices(rng, 30)
        batch = conjugate_field(nf, xs, Ls)
        single = np.array([conjugate_value(nf, x, L) for x, L in zip(xs, Ls)])
        np.testing.assert_allclose(batch, single, rtol=1e-8, atol=1e-12)

    def test_biconjugate_reproduces_m(self, rng):
        """Test that conjugating M* numerically returns M."""
        nf = nfn.carreau(2.5)
        conj = nfn.conjugate_nfunction(nf)
        for x, K in zip(_points(rng, 5), _matrices(rng, 5, r_max=2.0)):
            again = conjugate_value(conj, x, K)
            value = evaluate(nf, x, K)
            assert abs(again - value) / (1.0 + value) < 1e-4

    def test_conjugate_table_columns(self, rng):
        """Test the table layout (x..., L..., M_star_value)."""
        rows = conjugate_table(nfn.isotropic_power(2.0), _points(rng, 3), _matrices(rng, 3))
        assert list(rows[0]) == ["x1", "x2", "L11", "L12", "L21", "L22", "M_star_value"]
        assert len(rows) == 3

    def test_closed_form_dispatch(self):
        """Test that conjugate uses the closed form of the exponential function."""
        L = np.diag([1.0, 0.0])
        assert conjugate(nfn.exponential(), [0.0, 0.0], L) == pytest.approx(2.0 * np.log(2.0) - 1.0, abs=1e-15)

    def test_custom_numerical(self):
        """Test numerical conjugation of a wrapped quadratic integrand without radial profile."""
        nf = nfn.custom(lambda x, K: 0.5 * frobenius(K) ** 2, dim=2, lower_power=2.0, lower_const=0.5)
        L = np.array([[1.0, 0.5], [0.5, -1.0]])
        assert conjugate(nf, [0.0, 0.0], L) == pytest.approx(0.5 * frobenius(L) ** 2, abs=1e-6)

    def test_invalid_params(self):
        """Test that a nonpositive radius cap is rejected."""
        with pytest.raises(InvalidInputError):
            ConjugateParams(radius_cap=0.0)


class TestFenchelYoung:
    """Fenchel-Young gap."""

    BUILT_INS = [
        nfn.isotropic_power(2.2),
        nfn.carreau(2.2),
        nfn.variable_exponent(2.0, 3.0),
        nfn.anisotropic_separable([[2.0, 3.0], [3.0, 2.5]]),
        nfn.exponential(),
    ]

    @pytest.mark.parametrize("nf", BUILT_INS, ids=lambda nf: nf.name)
    def test_gap_nonnegative(self, rng, nf):
        """Test gap >= -1e-12 on 10^4 random pairs."""
        xs = _points(rng, 10_000)
        K = _matrices(rng, 10_000)
        L = _matrices(rng, 10_000)
        gap = fenchel_young_gap_field(nf, xs, K, L)
        assert np.all(gap >= -1e-12 * (1.0 + np.abs(contract(K, L))))

    def test_equality_at_subgradient(self, rng):
        """Test the gap vanishes at L = |K|^(p-2) K."""
        p = 2.2
        nf = nfn.isotropic_power(p)
        for x, K in zip(_points(rng, 20), _matrices(rng, 20)):
            L = frobenius(K) ** (p - 2.0) * K
            assert abs(fenchel_young_gap(nf, x, K, L)) < 1e-6

    def test_zero_pair(self):
        """Test gap(0, 0) = 0."""
        assert fenchel_young_gap(nfn.carreau(2.5), [0.0, 0.0], np.zeros((2, 2)), np.zeros((2, 2))) == 0.0


class TestAxioms:
    """Sampled structural checks and the doubling classifier."""

    @pytest.fixture
    def spec(self):
        """Default sampling over eight points on the diagonal."""
        pts = np.linspace(0.0, 2.0 * np.pi, 9)[:-1]
        return SampleSpec(x_points=np.stack([pts, pts], axis=1), seed=5)

    def test_power_passes_and_plausible(self, spec):
        """Test |K|^p / p passes every axiom and is Delta2-plausible."""
        report = check_axioms(nfn.isotropic_power(2.5), spec)
        assert report.passed
        assert report.delta2_verdict is Delta2Verdict.PLAUSIBLE
        assert report.delta2_ratios[-1] == pytest.approx(2.0**2.5, rel=1e-2)

    def test_variable_exponent_plausible(self, spec):
        """Test p(x) in [2, 3] is Delta2-plausible with ratio at most 2^3."""
        report = check_axioms(nfn.variable_exponent(2.0, 3.0), spec)
        assert report.delta2_verdict is Delta2Verdict.PLAUSIBLE
        assert max(report.delta2_ratios) <= 8.0

    def test_exponential_violated(self):
        """Test exp(|K|) - |K| - 1 is Delta2-violated on rungs 1..20."""
        spec = SampleSpec(x_points=np.zeros((1, 2)), radii=np.arange(1.0, 21.0), direction_count=4)
        report = check_axioms(nfn.exponential(), spec)
        assert report.delta2_verdict is Delta2Verdict.VIOLATED
        assert all(b > a for a, b in zip(report.delta2_ratios, report.delta2_ratios[1:]))

    def test_carreau_conjugate_lower_bound(self, spec):
        """Test the Carreau conjugate carries a lower bound its numerical values satisfy."""
        conj = nfn.conjugate_nfunction(nfn.carreau(2.2))
        q = 2.2 / 1.2
        assert conj.lower_power == pytest.approx(q)
        assert 0.0 < conj.lower_const < 1.0 / q
        assert conj.offset > 0.0
        report = check_axioms(conj, spec)
        assert report.checks["lower_bound"].passed

    def test_power_conjugate_lower_bound_exact(self, spec):
        """Test the power conjugate bound is scale^(1-q) |L|^q / q and holds."""
        conj = nfn.conjugate_nfunction(nfn.isotropic_power(2.5, scale=2.0))
        q = 2.5 / 1.5
        assert conj.lower_const == pytest.approx(2.0 ** (1.0 - q) / q, rel=1e-12)
        assert conj.offset == 0.0
        assert check_axioms(conj, spec).checks["lower_bound"].passed

    def test_conjugate_without_growth_bound(self, spec):
        """Test a conjugate of a primal without a power growth bound declares no lower bound."""
        conj = nfn.conjugate_nfunction(nfn.exponential())
        assert conj.lower_const is None
        assert "lower_bound" not in check_axioms(conj, spec).checks

    def test_report_rows(self, spec):
        """Test that the rows carry every axiom plus the doubling row."""
        rows = check_axioms(nfn.carreau(2.2), spec).to_rows()
        names = [row["check"] for row in rows]
        assert names[-1] == "delta2"
        assert {"zero", "evenness", "convexity", "superlinearity", "lower_bound"} <= set(names)

    def test_empty_spec_rejected(self):
        """Test that an empty x sample raises InvalidInputError."""
        with pytest.raises(InvalidInputError):
            SampleSpec(x_points=np.zeros((0, 2)))
