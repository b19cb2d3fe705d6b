"""
Constitutive catalogue: stress tensors, heat fluxes, sampled admissibility
checks and the existence-hypothesis validator.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from core import nfunction as nfn
from core.errors import InvalidInputError
from core.nfunction import (
    AxiomCheck,
    ConjugateParams,
    NFunction,
    SampleSpec,
    check_axioms,
    conjugate_field,
    conjugate_nfunction,
    contract,
    frobenius,
    random_symmetric_directions,
    symmetrize,
)
from core.schema import Delta2Verdict, StressKind

logger = logging.getLogger(__name__)

StressEvaluator = Callable[[np.ndarray, np.ndarray, np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Viscosity:
    """mu(rho, theta) = mu0 (1 + a rho)(1 + b / theta) clipped to [mu_low, mu_high]."""

    mu0: float = 1.0
    a: float = 0.0
    b: float = 0.0
    mu_low: Optional[float] = None
    mu_high: Optional[float] = None

    def __post_init__(self):
        if not self.mu0 > 0:
            raise InvalidInputError(f"mu0 must be positive, got {self.mu0}")
        if (self.a or self.b) and (self.mu_low is None or self.mu_high is None):
            raise InvalidInputError("a varying viscosity needs explicit mu_low and mu_high")
        low = self.mu0 if self.mu_low is None else self.mu_low
        high = self.mu0 if self.mu_high is None else self.mu_high
        if not 0 < low <= high:
            raise InvalidInputError(f"need 0 < mu_low <= mu_high, got [{low}, {high}]")
        object.__setattr__(self, "mu_low", float(low))
        object.__setattr__(self, "mu_high", float(high))

    @classmethod
    def constant(cls, mu: float) -> "Viscosity":
        return cls(mu0=mu)

    @property
    def is_constant(self) -> bool:
        return self.mu_low == self.mu_high

    @property
    def contrast(self) -> float:
        return self.mu_high / self.mu_low

    def __call__(self, rho, theta) -> np.ndarray:
        rho = np.asarray(rho, dtype=float)
        theta = np.asarray(theta, dtype=float)
        if self.is_constant:
            return np.full(np.broadcast(rho, theta).shape, self.mu_low)
        raw = self.mu0 * (1.0 + self.a * rho) * (1.0 + self.b / theta)
        return np.clip(raw, self.mu_low, self.mu_high)


@dataclass
class StressModel:
    """A stress law S(x, rho, theta, K) paired with its N-function.

    `coercivity_const` is the c_c of the coercivity inequality; it is set
    analytically by the built-in constructors and may be overwritten by
    `estimate_coercivity_const`.
    """

    evaluator: StressEvaluator
    nfunction: NFunction
    kind: StressKind
    viscosity: Viscosity = field(default_factory=Viscosity)
    coercivity_const: float = 1.0
    name: str = "stress"
    params: Dict[str, Any] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.nfunction.dim

    @property
    def lower_power(self) -> float:
        return self.nfunction.lower_power

    def __call__(self, x, rho, theta, K) -> np.ndarray:
        return self.evaluator(
            np.asarray(x, dtype=float),
            np.asarray(rho, dtype=float),
            np.asarray(theta, dtype=float),
            symmetrize(K),
        )


@dataclass(frozen=True)
class HeatFluxModel:
    """q(rho, theta, g) = kappa(rho) theta^beta g."""

    kappa_low: float = 1.0
    kappa_high: float = 1.0
    beta: float = 0.0

    def __post_init__(self):
        if not 0 < self.kappa_low <= self.kappa_high:
            raise InvalidInputError(
                f"need 0 < kappa_low <= kappa_high, got [{self.kappa_low}, {self.kappa_high}]"
            )

    @property
    def is_constant(self) -> bool:
        return self.kappa_low == self.kappa_high

    def kappa(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=float)
        if self.is_constant:
            return np.full(rho.shape, self.kappa_low)
        return self.kappa_low + (self.kappa_high - self.kappa_low) * rho / (1.0 + rho)

    def kappa0(self, rho, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if self.beta == 0:
            return self.kappa(rho) * np.ones_like(theta)
        return self.kappa(rho) * np.maximum(theta, 0.0) ** self.beta


# ---------------------------------------------------------------------------
# Built-in catalogue
# ---------------------------------------------------------------------------


def _safe_power(r: np.ndarray, exponent) -> np.ndarray:
    """r^exponent for r > 0 and 0 at r = 0."""
    positive = r > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(positive, np.where(positive, r, 1.0) ** exponent, 0.0)
    return out


def _young_ratio(p: float, contrast: float) -> float:
    """inf of S:K / (M + M*) for mu-weighted power laws paired with mu_low |K|^p / p."""
    q = p / (p - 1.0)
    return contrast / (1.0 / p + contrast**q / q)


def _power_coercivity(p_values: Sequence[float], viscosity: Viscosity) -> float:
    if viscosity.is_constant:
        return 1.0
    ratios = [_young_ratio(p, viscosity.contrast) for p in p_values]
    return float(min(ratios)) * (1.0 - 1e-6)


def _estimate_with_margin(model: "StressModel") -> None:
    # no closed form for c_c; keep a margin below the sampled infimum
    estimate_coercivity_const(model, AdmissibilitySpec(sample_count=2000, pair_count=10))
    model.coercivity_const *= 0.99


def power_law(
    p: float, dim: int = 2, viscosity: Optional[Viscosity] = None, nfunction: Optional[NFunction] = None
) -> StressModel:
    """S = mu(rho, theta) |K|^(p-2) K."""
    viscosity = viscosity or Viscosity()

    def evaluator(x, rho, theta, K):
        mu = viscosity(rho, theta)
        return (mu * _safe_power(frobenius(K), p - 2.0))[..., None, None] * K

    paired = nfunction or nfn.isotropic_power(p, dim, scale=viscosity.mu_low)
    model = StressModel(
        evaluator=evaluator,
        nfunction=paired,
        kind=StressKind.POWER_LAW,
        viscosity=viscosity,
        coercivity_const=_power_coercivity([p], viscosity),
        name=f"power-law(p={p:g})",
        params={"p": p},
    )
    if nfunction is not None:
        _estimate_with_margin(model)
    return model


def carreau(
    p: float, dim: int = 2, viscosity: Optional[Viscosity] = None, nfunction: Optional[NFunction] = None
) -> StressModel:
    """S = mu(rho, theta) (1 + |K|^2)^((p-2)/2) K."""
    viscosity = viscosity or Viscosity()

    def evaluator(x, rho, theta, K):
        mu = viscosity(rho, theta)
        r = frobenius(K)
        return (mu * (1.0 + r * r) ** (0.5 * (p - 2.0)))[..., None, None] * K

    paired = nfunction or nfn.carreau(p, dim, scale=viscosity.mu_low)
    model = StressModel(
        evaluator=evaluator,
        nfunction=paired,
        kind=StressKind.CARREAU,
        viscosity=viscosity,
        coercivity_const=1.0,
        name=f"carreau(p={p:g})",
        params={"p": p},
    )
    if nfunction is not None or not viscosity.is_constant:
        _estimate_with_margin(model)
    return model


def variable_exponent_law(
    p_min: float,
    p_max: float,
    dim: int = 2,
    exponent: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    viscosity: Optional[Viscosity] = None,
) -> StressModel:
    """S = mu(rho, theta) |K|^(p(x)-2) K."""
    viscosity = viscosity or Viscosity()
    paired = nfn.variable_exponent(p_min, p_max, dim, exponent, scale=viscosity.mu_low)
    exponent = paired.params["exponent"]

    def evaluator(x, rho, theta, K):
        mu = viscosity(rho, theta)
        px = exponent(np.broadcast_to(x, K.shape[:-2] + (K.shape[-1],)))
        return (mu * _safe_power(frobenius(K), px - 2.0))[..., None, None] * K

    return StressModel(
        evaluator=evaluator,
        nfunction=paired,
        kind=StressKind.VARIABLE_EXPONENT,
        viscosity=viscosity,
        coercivity_const=_power_coercivity(np.linspace(p_min, p_max, 257), viscosity),
        name=f"variable-exponent(p in [{p_min:g}, {p_max:g}])",
        params={"p_min": p_min, "p_max": p_max},
    )


def anisotropic_law(exponents: Sequence[Sequence[float]], viscosity: Optional[Viscosity] = None) -> StressModel:
    """S_ij = mu(rho, theta) |K_ij|^(p_ij-2) K_ij."""
    viscosity = viscosity or Viscosity()
    paired = nfn.anisotropic_separable(exponents, scale=viscosity.mu_low)
    P = paired.params["exponents"]

    def evaluator(x, rho, theta, K):
        mu = viscosity(rho, theta)
        return mu[..., None, None] * np.sign(K) * np.abs(K) ** (P - 1.0)

    return StressModel(
        evaluator=evaluator,
        nfunction=paired,
        kind=StressKind.ANISOTROPIC_SEPARABLE,
        viscosity=viscosity,
        coercivity_const=_power_coercivity(np.unique(P), viscosity),
        name=paired.name,
        params={"exponents": P},
    )


def custom_law(
    evaluator: StressEvaluator,
    nfunction: NFunction,
    coercivity_const: Optional[float] = None,
    viscosity: Optional[Viscosity] = None,
    name: str = "custom",
) -> StressModel:
    """Wrap a user stress law; c_c is estimated when not given."""
    model = StressModel(
        evaluator=evaluator,
        nfunction=nfunction,
        kind=StressKind.CUSTOM,
        viscosity=viscosity or Viscosity(),
        coercivity_const=coercivity_const or 1.0,
        name=name,
    )
    if coercivity_const is None:
        estimate_coercivity_const(model, AdmissibilitySpec(sample_count=2000, pair_count=10))
    return model


# ---------------------------------------------------------------------------
# Pointwise operations
# ---------------------------------------------------------------------------


def stress(model: StressModel, x, rho: float, theta: float, K: np.ndarray) -> np.ndarray:
    """S(x, rho, theta, K) at one point."""
    if not rho > 0 or not theta > 0:
        raise InvalidInputError(f"density and temperature must be positive, got rho={rho}, theta={theta}")
    K = np.asarray(K, dtype=float)
    if K.shape != (model.dim, model.dim) or not np.all(np.isfinite(K)):
        raise InvalidInputError(f"K must be a finite {model.dim}x{model.dim} matrix")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return symmetrize(model(x, rho, theta, K))


def heat_flux(model: HeatFluxModel, rho: float, theta: float, g: np.ndarray) -> np.ndarray:
    """q = kappa0(rho, theta) g."""
    if not rho > 0:
        raise InvalidInputError(f"density must be positive, got {rho}")
    if theta <= 0 and model.beta < 0:
        raise InvalidInputError(f"theta^beta is singular at theta={theta} with beta={model.beta}")
    return float(model.kappa0(rho, theta)) * np.asarray(g, dtype=float)


# ---------------------------------------------------------------------------
# Sampled admissibility
# ---------------------------------------------------------------------------


@dataclass
class AdmissibilitySpec:
    """Sampling distributions for the constitutive checks."""

    x_points: np.ndarray = field(default_factory=lambda: np.linspace(0.0, 2.0 * np.pi, 9)[:-1, None])
    rho_range: Tuple[float, float] = (0.5, 2.0)
    theta_range: Tuple[float, float] = (0.5, 2.0)
    radius_range: Tuple[float, float] = (1e-3, 1e3)
    sample_count: int = 10_000
    pair_count: int = 10_000
    seed: int = 0
    tol: float = 1e-10
    monotonicity_tol: float = 1e-12
    conjugate_params: ConjugateParams = field(default_factory=ConjugateParams)

    def __post_init__(self):
        if self.sample_count < 1 or self.pair_count < 1:
            raise InvalidInputError("sample and pair counts must be positive")

    def points_for(self, dim: int) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(self.x_points, dtype=float))
        if pts.shape[1] == dim:
            return pts
        return np.repeat(pts[:, :1], dim, axis=1)


@dataclass
class AdmissibilityReport:
    """Per-check verdicts for a stress and heat-flux pair."""

    stress_name: str
    coercivity_const: float
    checks: Dict[str, AxiomCheck]
    seed: int

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def to_rows(self) -> List[Dict[str, Any]]:
        return [
            {"check": c.name, "passed": c.passed, "worst": c.worst, "witness": repr(c.witness)}
            for c in self.checks.values()
        ]


def _draw(model: StressModel, spec: AdmissibilitySpec, rng: np.random.Generator, count: int):
    pts = spec.points_for(model.dim)
    x = pts[rng.integers(0, pts.shape[0], count)]
    rho = rng.uniform(*spec.rho_range, count)
    theta = rng.uniform(*spec.theta_range, count)
    lo, hi = np.log10(spec.radius_range[0]), np.log10(spec.radius_range[1])
    radii = 10.0 ** rng.uniform(lo, hi, count)
    K = random_symmetric_directions(rng, count, model.dim) * radii[:, None, None]
    return x, rho, theta, K


def _gradient_magnitudes(rng: np.random.Generator, spec: AdmissibilitySpec) -> np.ndarray:
    lo, hi = np.log10(spec.radius_range[0]), np.log10(spec.radius_range[1])
    return (10.0 ** rng.uniform(lo, hi, spec.sample_count))[:, None]


def _coercivity_terms(model: StressModel, x, rho, theta, K, params: ConjugateParams):
    S = model(x, rho, theta, K)
    work = contract(S, K)
    M = model.nfunction(x, K)
    M_star = conjugate_field(model.nfunction, x, S, params)
    return S, work, M, M_star


def check_admissibility(
    model: StressModel, heat: HeatFluxModel, sample_spec: Optional[AdmissibilitySpec] = None
) -> AdmissibilityReport:
    """Sampled coercivity, monotonicity and heat-flux bound checks."""
    spec = sample_spec or AdmissibilitySpec()
    rng = np.random.default_rng(spec.seed)
    checks: Dict[str, AxiomCheck] = {}
    c_c = model.coercivity_const

    x, rho, theta, K = _draw(model, spec, rng, spec.sample_count)
    S, work, M, M_star = _coercivity_terms(model, x, rho, theta, K, spec.conjugate_params)
    scale = 1.0 + frobenius(K) ** model.lower_power
    residual = work - c_c * (M + M_star)
    j = int(np.argmin(residual / scale))
    checks["coercivity"] = AxiomCheck(
        "coercivity",
        bool(np.all(residual >= -spec.tol * scale)),
        float(residual[j]),
        {"K": np.round(K[j], 6).tolist(), "rho": float(rho[j]), "theta": float(theta[j])},
    )

    x2, rho2, theta2, K1 = _draw(model, spec, rng, spec.pair_count)
    lo, hi = np.log10(spec.radius_range[0]), np.log10(spec.radius_range[1])
    K2 = random_symmetric_directions(rng, spec.pair_count, model.dim) * (
        10.0 ** rng.uniform(lo, hi, spec.pair_count)
    )[:, None, None]
    S1 = model(x2, rho2, theta2, K1)
    S2 = model(x2, rho2, theta2, K2)
    product = contract(S1 - S2, K1 - K2)
    mono_scale = 1.0 + contract(S1, K1) + contract(S2, K2)
    j = int(np.argmin(product / mono_scale))
    checks["monotonicity"] = AxiomCheck(
        "monotonicity",
        bool(np.all(product >= -spec.monotonicity_tol * mono_scale)),
        float(product[j]),
        {"K1": np.round(K1[j], 6).tolist(), "K2": np.round(K2[j], 6).tolist()},
    )

    g = rng.standard_normal((spec.sample_count, model.dim)) * _gradient_magnitudes(rng, spec)
    q = heat.kappa0(rho, theta)[:, None] * g
    weight = np.maximum(theta, 0.0) ** heat.beta
    g2 = np.sum(g * g, axis=-1)
    lower_gap = heat.kappa_low * weight * g2 - np.sum(q * g, axis=-1)
    upper_gap = np.linalg.norm(q, axis=-1) - heat.kappa_high * weight * np.sqrt(g2)
    heat_scale = 1.0 + heat.kappa_high * weight * g2
    for name, gap in (("heat_lower", lower_gap), ("heat_upper", upper_gap)):
        j = int(np.argmax(gap / heat_scale))
        checks[name] = AxiomCheck(
            name,
            bool(np.all(gap <= 1e-12 * heat_scale)),
            float(max(gap[j], 0.0)),
            {"rho": float(rho[j]), "theta": float(theta[j]), "g": np.round(g[j], 6).tolist()},
        )

    report = AdmissibilityReport(model.name, c_c, checks, spec.seed)
    logger.info(
        f"[Constitutive] Admissibility of {model.name}: "
        + ", ".join(f"{c.name}={'pass' if c.passed else 'FAIL'}" for c in checks.values())
    )
    return report


def estimate_coercivity_const(model: StressModel, sample_spec: Optional[AdmissibilitySpec] = None) -> float:
    """Empirical inf of S:K / (M + M*) clipped to (0, 1]; stored on the model."""
    spec = sample_spec or AdmissibilitySpec()
    rng = np.random.default_rng(spec.seed)
    x, rho, theta, K = _draw(model, spec, rng, spec.sample_count)
    _, work, M, M_star = _coercivity_terms(model, x, rho, theta, K, spec.conjugate_params)
    total = M + M_star
    keep = total > 0
    if not np.any(keep):
        raise InvalidInputError("no sample with M + M* > 0")
    ratio = float(np.min(work[keep] / total[keep]))
    value = float(np.clip(ratio, np.finfo(float).tiny, 1.0))
    model.coercivity_const = value
    logger.info(f"[Constitutive] Estimated c_c = {value:.12g} for {model.name}")
    return value


# ---------------------------------------------------------------------------
# Existence hypotheses
# ---------------------------------------------------------------------------


def power_threshold(d: int) -> Fraction:
    """Smallest admissible lower power, (3d + 2) / (d + 2)."""
    return Fraction(3 * d + 2, d + 2)


def beta_threshold(p: float) -> float:
    """beta must exceed -min(2/3, (3p - 5)/(3p - 3))."""
    return -min(2.0 / 3.0, (3.0 * p - 5.0) / (3.0 * p - 3.0))


@dataclass
class HypothesisCheck:
    name: str
    passed: bool
    detail: str
    informational: bool = False


@dataclass
class HypothesisVerdict:
    """Outcome of the existence-hypothesis validation."""

    checks: List[HypothesisCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if not c.informational)

    @property
    def failures(self) -> List[HypothesisCheck]:
        return [c for c in self.checks if not c.passed and not c.informational]

    def get(self, name: str) -> Optional[HypothesisCheck]:
        for check in self.checks:
            if check.name == name:
                return check
        return None

    def summary(self) -> str:
        return "; ".join(f"{c.name}: {'pass' if c.passed else 'fail'} ({c.detail})" for c in self.checks)


def _conjugate_sample_spec(nf: NFunction) -> SampleSpec:
    pts = np.linspace(0.0, 2.0 * np.pi, 5)[:-1]
    return SampleSpec(
        x_points=np.repeat(pts[:, None], nf.dim, axis=1),
        direction_count=4,
        radii=np.geomspace(1e-2, 1e2, 10),
        triple_count=16,
    )


def validate_hypotheses(
    model: StressModel,
    heat: HeatFluxModel,
    d: int,
    data: Optional[Any] = None,
    params: Optional[ConjugateParams] = None,
) -> HypothesisVerdict:
    """Check the existence hypotheses; never raises on a failed hypothesis.

    Args:
        model: Stress model; its N-function supplies p
        heat: Heat-flux model; supplies beta
        d: Spatial dimension
        data: Object with rho0, theta0, rho_low, rho_high, theta_low (optional)
        params: Conjugation parameters for the doubling test of M*
    """
    checks: List[HypothesisCheck] = []
    p = float(model.lower_power)

    threshold = power_threshold(d)
    checks.append(
        HypothesisCheck(
            "power",
            p >= float(threshold) - 1e-12,
            f"p = {p:g}, need p ≥ {threshold}",
        )
    )

    conj = conjugate_nfunction(model.nfunction, params)
    try:
        report = check_axioms(conj, _conjugate_sample_spec(model.nfunction))
        plausible = report.delta2_verdict is Delta2Verdict.PLAUSIBLE
        checks.append(HypothesisCheck("conjugate_delta2", plausible, f"M* {report.delta2_verdict.value}"))
        checks.append(
            HypothesisCheck(
                "conjugate_superlinear",
                report.large_slope > 1.0,
                f"M*(rE)/r at the top rung = {report.large_slope:.4g}",
                informational=True,
            )
        )
    except Exception as e:
        checks.append(HypothesisCheck("conjugate_delta2", False, f"conjugate check failed: {e}"))

    beta_min = beta_threshold(p)
    checks.append(
        HypothesisCheck("beta", heat.beta > beta_min, f"beta = {heat.beta:g}, need beta > {beta_min:.6g}")
    )

    if data is not None:
        rho0 = np.asarray(data.rho0)
        theta0 = np.asarray(data.theta0)
        rho_ok = 0 < data.rho_low <= float(rho0.min()) and float(rho0.max()) <= data.rho_high
        checks.append(
            HypothesisCheck(
                "density_bounds",
                bool(rho_ok),
                f"rho0 in [{float(rho0.min()):.6g}, {float(rho0.max()):.6g}], "
                f"bounds [{data.rho_low:g}, {data.rho_high:g}]",
            )
        )
        theta_ok = data.theta_low > 0 and float(theta0.min()) >= data.theta_low
        checks.append(
            HypothesisCheck(
                "temperature_floor",
                bool(theta_ok),
                f"min theta0 = {float(theta0.min()):.6g}, floor {data.theta_low:g}",
            )
        )

    verdict = HypothesisVerdict(checks)
    for failure in verdict.failures:
        logger.warning(f"[Constitutive] Hypothesis {failure.name} fails: {failure.detail}")
    return verdict
