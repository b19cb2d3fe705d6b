"""
Anisotropic x-dependent N-functions: evaluation, numerical conjugation and
sampled structural checks.

Matrix arguments are symmetric d x d arrays; every evaluator broadcasts over
leading axes, taking x of shape (..., d) and K of shape (..., d, d).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from core.errors import CapExceededError, InvalidInputError
from core.schema import Delta2Verdict, NFunctionKind

logger = logging.getLogger(__name__)

Evaluator = Callable[[np.ndarray, np.ndarray], np.ndarray]
RadialProfile = Callable[[np.ndarray, np.ndarray], np.ndarray]

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ConjugateParams:
    """Numerical parameters of the conjugate maximization."""

    radius_cap: float = 1e6
    ascent_tol: float = 1e-8
    max_iters: int = 500
    multistart_count: int = 8
    cap_retries: int = 8
    seed: int = 0

    def __post_init__(self):
        if not self.radius_cap > 0:
            raise InvalidInputError(f"radius_cap must be positive, got {self.radius_cap}")
        if not self.ascent_tol > 0:
            raise InvalidInputError(f"ascent_tol must be positive, got {self.ascent_tol}")
        if self.max_iters < 1 or self.multistart_count < 1:
            raise InvalidInputError("max_iters and multistart_count must be positive")


@dataclass(frozen=True)
class NFunction:
    """An x-dependent convex integrand M(x, K) on symmetric matrices.

    Attributes:
        evaluator: Vectorized map (x, K) -> M(x, K)
        dim: Spatial dimension d
        lower_power: Exponent p of the coercive bound M >= c_low |K|^p - offset
        lower_const: Constant c_low of that bound, None when no bound is declared
        offset: Constant C_tilde of that bound
        upper_power: Exponent P of a growth bound M <= c_up |K|^P + upper_offset, if known
        upper_const: Constant c_up of that bound
        upper_offset: Additive constant of that bound
        kind: Structural family
        closed_form_conjugate: Vectorized map (x, L) -> M*(x, L), when analytic
        radial: Profile phi(x, r) with M(x, K) = phi(x, |K|), for isotropic kinds
        name: Human-readable label
        params: Family parameters (exponents, scales)
    """

    evaluator: Evaluator
    dim: int
    lower_power: float
    lower_const: Optional[float]
    offset: float = 0.0
    kind: NFunctionKind = NFunctionKind.CUSTOM
    closed_form_conjugate: Optional[Evaluator] = None
    radial: Optional[RadialProfile] = None
    name: str = "custom"
    params: Dict[str, Any] = field(default_factory=dict)
    upper_power: Optional[float] = None
    upper_const: Optional[float] = None
    upper_offset: float = 0.0

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise InvalidInputError(f"dimension must be 1, 2 or 3, got {self.dim}")
        if self.lower_const is not None and not self.lower_const > 0:
            raise InvalidInputError("lower_const must be positive")
        if self.offset < 0 or self.upper_offset < 0:
            raise InvalidInputError("offsets must be nonnegative")
        if self.upper_const is not None:
            if not self.upper_const > 0 or self.upper_power is None or not self.upper_power > 1:
                raise InvalidInputError("an upper bound needs upper_const > 0 and upper_power > 1")

    def __call__(self, x: np.ndarray, K: np.ndarray) -> np.ndarray:
        return self.evaluator(np.asarray(x, dtype=float), np.asarray(K, dtype=float))

    @property
    def is_isotropic(self) -> bool:
        return self.radial is not None


# ---------------------------------------------------------------------------
# Matrix helpers
# ---------------------------------------------------------------------------


def symmetrize(K: np.ndarray) -> np.ndarray:
    """Return the symmetric part of a (batch of) square matrices."""
    K = np.asarray(K, dtype=float)
    return 0.5 * (K + np.swapaxes(K, -1, -2))


def frobenius(K: np.ndarray) -> np.ndarray:
    """Frobenius norm over the trailing two axes."""
    return np.sqrt(np.sum(np.asarray(K) ** 2, axis=(-2, -1)))


def contract(K: np.ndarray, L: np.ndarray) -> np.ndarray:
    """Double contraction K:L over the trailing two axes."""
    return np.sum(np.asarray(K) * np.asarray(L), axis=(-2, -1))


def _check_matrix(K: np.ndarray, dim: int, label: str) -> np.ndarray:
    K = np.asarray(K, dtype=float)
    if K.shape[-2:] != (dim, dim):
        raise InvalidInputError(f"{label} must have trailing shape ({dim}, {dim}), got {K.shape}")
    if not np.all(np.isfinite(K)):
        raise InvalidInputError(f"{label} has non-finite entries")
    return symmetrize(K)


def _as_point(x: Any, dim: int) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape[-1] != dim:
        raise InvalidInputError(f"spatial point must have {dim} coordinates, got {x.shape}")
    return x


def random_symmetric_directions(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    """Draw symmetric matrices of unit Frobenius norm."""
    A = rng.standard_normal((count, dim, dim))
    A = symmetrize(A)
    return A / frobenius(A)[:, None, None]


# ---------------------------------------------------------------------------
# Built-in families
# ---------------------------------------------------------------------------


def isotropic_power(p: float, dim: int = 2, scale: float = 1.0) -> NFunction:
    """M(x, K) = scale |K|^p / p, with M*(L) = scale^(1-p') |L|^p' / p'."""
    if not p > 1:
        raise InvalidInputError(f"power exponent must exceed 1, got {p}")
    q = p / (p - 1.0)

    def radial(x, r):
        return scale * np.abs(r) ** p / p

    def evaluator(x, K):
        return radial(x, frobenius(K))

    def conjugate(x, L):
        return scale ** (1.0 - q) * frobenius(L) ** q / q

    return NFunction(
        evaluator=evaluator,
        dim=dim,
        lower_power=p,
        lower_const=scale / p,
        offset=0.0,
        kind=NFunctionKind.ISOTROPIC_POWER,
        closed_form_conjugate=conjugate,
        radial=radial,
        name=f"power(p={p:g}, scale={scale:g})",
        params={"p": p, "scale": scale},
        upper_power=p,
        upper_const=scale / p,
    )


def default_exponent(p_min: float, p_max: float) -> Callable[[np.ndarray], np.ndarray]:
    """p(x) = p_min + (p_max - p_min) sin^2(x_1)."""

    def exponent(x):
        x = np.asarray(x, dtype=float)
        return p_min + (p_max - p_min) * np.sin(x[..., 0]) ** 2

    return exponent


def variable_exponent(
    p_min: float,
    p_max: float,
    dim: int = 2,
    exponent: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    scale: float = 1.0,
) -> NFunction:
    """M(x, K) = scale |K|^p(x) / p(x) with p_min <= p(x) <= p_max."""
    if not 1 < p_min <= p_max < math.inf:
        raise InvalidInputError(f"need 1 < p_min <= p_max < inf, got [{p_min}, {p_max}]")
    exponent = exponent or default_exponent(p_min, p_max)

    def radial(x, r):
        px = exponent(x)
        return scale * np.abs(r) ** px / px

    def evaluator(x, K):
        return radial(x, frobenius(K))

    def conjugate(x, L):
        px = exponent(x)
        qx = px / (px - 1.0)
        return scale ** (1.0 - qx) * frobenius(L) ** qx / qx

    # |K|^p_min - 1 <= |K|^p(x) <= |K|^p_max + 1 on both sides of |K| = 1
    return NFunction(
        evaluator=evaluator,
        dim=dim,
        lower_power=p_min,
        lower_const=scale / p_max,
        offset=scale / p_max,
        kind=NFunctionKind.VARIABLE_EXPONENT,
        closed_form_conjugate=conjugate,
        radial=radial,
        name=f"variable-exponent(p in [{p_min:g}, {p_max:g}])",
        params={"p_min": p_min, "p_max": p_max, "exponent": exponent, "scale": scale},
        upper_power=p_max,
        upper_const=scale / p_min,
        upper_offset=scale / p_min,
    )


def anisotropic_separable(exponents: Sequence[Sequence[float]], scale: float = 1.0) -> NFunction:
    """M(x, K) = scale sum_ij |K_ij|^p_ij / p_ij over all d^2 entries."""
    P = np.asarray(exponents, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise InvalidInputError("exponent matrix must be square")
    if not np.allclose(P, P.T):
        raise InvalidInputError("exponent matrix must be symmetric")
    if np.any(P <= 1):
        raise InvalidInputError("all entry exponents must exceed 1")
    dim = P.shape[0]
    Q = P / (P - 1.0)
    p_min, p_max = float(P.min()), float(P.max())

    def evaluator(x, K):
        return scale * np.sum(np.abs(K) ** P / P, axis=(-2, -1))

    def conjugate(x, L):
        return np.sum(scale ** (1.0 - Q) * np.abs(L) ** Q / Q, axis=(-2, -1))

    # power-mean inequality for p_min >= 2: sum |a_ij|^p_min >= (d^2)^(1 - p_min/2) |K|^p_min
    lower_const = scale * float(dim * dim) ** (1.0 - p_min / 2.0) / p_max
    if p_min < 2:
        lower_const = scale / p_max
    return NFunction(
        evaluator=evaluator,
        dim=dim,
        lower_power=p_min,
        lower_const=lower_const,
        offset=scale * dim * dim / p_max,
        kind=NFunctionKind.ANISOTROPIC_SEPARABLE,
        closed_form_conjugate=conjugate,
        radial=None,
        name=f"anisotropic(p in [{p_min:g}, {p_max:g}])",
        params={"exponents": P, "scale": scale},
        # |K_ij| <= |K|
        upper_power=p_max,
        upper_const=scale * dim * dim / p_min,
        upper_offset=scale * dim * dim / p_min,
    )


def carreau(p: float, dim: int = 2, scale: float = 1.0) -> NFunction:
    """M(x, K) = scale ((1 + |K|^2)^(p/2) - 1) / p, whose gradient is the Carreau stress."""
    if not p >= 2:
        raise InvalidInputError(f"Carreau N-function needs p >= 2, got {p}")

    def radial(x, r):
        r = np.abs(r)
        # expm1/log1p keeps the small-|K| quadratic regime exact
        return scale * np.expm1(0.5 * p * np.log1p(r * r)) / p

    def evaluator(x, K):
        return radial(x, frobenius(K))

    closed = None
    if p == 2:

        def closed(x, L):
            return frobenius(L) ** 2 / (2.0 * scale)

    # r^p <= (1 + r^2)^(p/2) <= 2^(p/2 - 1) (1 + r^p) for p >= 2
    growth = 2.0 ** (0.5 * p - 1.0)
    return NFunction(
        evaluator=evaluator,
        dim=dim,
        lower_power=p,
        lower_const=scale / p,
        offset=scale / p,
        kind=NFunctionKind.CARREAU,
        closed_form_conjugate=closed,
        radial=radial,
        name=f"carreau(p={p:g}, scale={scale:g})",
        params={"p": p, "scale": scale},
        upper_power=p,
        upper_const=scale * growth / p,
        upper_offset=scale * (growth - 1.0) / p,
    )


def exponential(dim: int = 2) -> NFunction:
    """M(x, K) = exp(|K|) - |K| - 1, with M*(L) = (1 + |L|) ln(1 + |L|) - |L|."""

    def radial(x, r):
        r = np.abs(r)
        return np.expm1(r) - r

    def evaluator(x, K):
        return radial(x, frobenius(K))

    def conjugate(x, L):
        s = frobenius(L)
        return (1.0 + s) * np.log1p(s) - s

    return NFunction(
        evaluator=evaluator,
        dim=dim,
        lower_power=3.0,
        lower_const=1.0 / 6.0,
        offset=0.0,
        kind=NFunctionKind.CUSTOM,
        closed_form_conjugate=conjugate,
        radial=radial,
        name="exponential",
        params={},
    )


def custom(
    evaluator: Evaluator,
    dim: int,
    lower_power: float,
    lower_const: float,
    offset: float = 0.0,
    closed_form_conjugate: Optional[Evaluator] = None,
    radial: Optional[RadialProfile] = None,
    name: str = "custom",
) -> NFunction:
    """Wrap a user-supplied integrand."""
    return NFunction(
        evaluator=evaluator,
        dim=dim,
        lower_power=lower_power,
        lower_const=lower_const,
        offset=offset,
        kind=NFunctionKind.CUSTOM,
        closed_form_conjugate=closed_form_conjugate,
        radial=radial,
        name=name,
    )


# ---------------------------------------------------------------------------
# Evaluation and conjugation
# ---------------------------------------------------------------------------


def evaluate(nf: NFunction, x: Any, K: np.ndarray) -> float:
    """Evaluate M(x, K) at one point; K is symmetrized first."""
    x = _as_point(x, nf.dim)
    K = _check_matrix(K, nf.dim, "K")
    if not np.any(K):
        return 0.0
    value = float(nf(x, K))
    if not np.isfinite(value) or value < 0:
        raise InvalidInputError(f"{nf.name} returned {value} at |K|={float(frobenius(K)):.3g}")
    if value == 0.0:
        # underflow; M vanishes only at K = 0
        logger.debug(f"[NFunction] {nf.name} underflowed at |K|={float(frobenius(K)):.3g}")
        return float(np.finfo(float).tiny)
    return value


def _radial_conjugate(nf: NFunction, x: np.ndarray, s: float, params: ConjugateParams) -> float:
    """sup_r (r s - phi(x, r)) by a doubling bracket and bounded golden-section search."""

    def objective(r):
        return float(r * s - nf.radial(x, np.asarray(r)))

    cap = params.radius_cap
    for attempt in range(params.cap_retries + 1):
        lo, r = 0.0, 1.0
        while r < cap and objective(2.0 * r) > objective(r):
            lo, r = r, 2.0 * r
        if r < cap:
            hi = 2.0 * r
            result = minimize_scalar(
                lambda t: -objective(t),
                bounds=(lo, hi),
                method="bounded",
                options={"xatol": params.ascent_tol * max(hi, 1e-300), "maxiter": params.max_iters},
            )
            best = max(-float(result.fun), objective(lo), 0.0)
            return best
        cap *= 2.0
        logger.debug(f"[NFunction] radial maximizer hit cap, escalating to {cap:.3g} (attempt {attempt + 1})")
    raise CapExceededError(
        f"{nf.name}: conjugate maximizer still on radius cap {cap:.3g} at |L|={s:.3g}", cap
    )


def _matrix_conjugate(nf: NFunction, x: np.ndarray, L: np.ndarray, params: ConjugateParams) -> float:
    """sup_K (K:L - M(x, K)) by multistart BFGS over the free entries of symmetric K."""
    d = nf.dim
    iu = np.triu_indices(d)
    off = iu[0] != iu[1]
    weights = np.where(off, 2.0, 1.0)
    l_vec = L[iu]

    def unpack(v):
        K = np.zeros((d, d))
        K[iu] = v
        K.T[iu] = v
        return K

    def negative(v):
        return -(float(np.dot(weights * v, l_vec)) - float(nf(x, unpack(v))))

    rng = np.random.default_rng(params.seed)
    norm_l = float(frobenius(L))
    cap = params.radius_cap
    for attempt in range(params.cap_retries + 1):
        starts = [np.zeros_like(l_vec), l_vec.copy()]
        while len(starts) < params.multistart_count:
            starts.append(rng.standard_normal(l_vec.shape) * max(norm_l, 1.0))
        best_value, best_v = 0.0, np.zeros_like(l_vec)
        for v0 in starts[: params.multistart_count]:
            result = minimize(
                negative,
                v0,
                method="BFGS",
                jac="3-point",
                options={"gtol": params.ascent_tol, "maxiter": params.max_iters},
            )
            value = -float(result.fun)
            if np.isfinite(value) and value > best_value:
                best_value, best_v = value, result.x
        if float(frobenius(unpack(best_v))) < cap:
            return best_value
        cap *= 2.0
        logger.debug(f"[NFunction] matrix maximizer beyond cap, escalating to {cap:.3g}")
    raise CapExceededError(f"{nf.name}: conjugate maximizer beyond radius cap {cap:.3g}", cap)


def conjugate_value(
    nf: NFunction, x: Any, L: np.ndarray, params: Optional[ConjugateParams] = None
) -> float:
    """Numerical M*(x, L) = sup_K (K:L - M(x, K)).

    Isotropic kinds reduce to a one-dimensional concave maximization along
    L/|L|; all other kinds use multistart quasi-Newton ascent.
    """
    params = params or ConjugateParams()
    x = _as_point(x, nf.dim)
    L = _check_matrix(L, nf.dim, "L")
    s = float(frobenius(L))
    if s == 0.0:
        return 0.0
    if nf.is_isotropic:
        return _radial_conjugate(nf, x, s, params)
    return _matrix_conjugate(nf, x, L, params)


def conjugate(nf: NFunction, x: Any, L: np.ndarray, params: Optional[ConjugateParams] = None) -> float:
    """M*(x, L) from the closed form when one exists, numerically otherwise."""
    if nf.closed_form_conjugate is not None:
        x = _as_point(x, nf.dim)
        L = _check_matrix(L, nf.dim, "L")
        return float(nf.closed_form_conjugate(x, L))
    return conjugate_value(nf, x, L, params)


def _radial_conjugate_batch(nf: NFunction, x: np.ndarray, s: np.ndarray, params: ConjugateParams) -> np.ndarray:
    """Vectorized golden-section maximization of r s - phi(x, r) for many points."""

    def objective(r):
        return r * s - nf.radial(x, r)

    active = s > 0
    lo = np.zeros_like(s)
    hi = np.ones_like(s)
    cap = params.radius_cap
    grow = active.copy()
    while np.any(grow):
        with np.errstate(over="ignore", invalid="ignore"):
            better = objective(2.0 * hi) > objective(hi)
        grow = grow & better & (hi < cap)
        lo = np.where(grow, hi, lo)
        hi = np.where(grow, 2.0 * hi, hi)
    if np.any(active & (hi >= cap)):
        raise CapExceededError(f"{nf.name}: batch conjugate maximizer reached radius cap {cap:.3g}", cap)
    a, b = lo, 2.0 * hi
    for _ in range(params.max_iters):
        if np.all((b - a) <= params.ascent_tol * 1e-4 * np.maximum(b, 1e-300)):
            break
        c = b - GOLDEN * (b - a)
        e = a + GOLDEN * (b - a)
        left = objective(c) > objective(e)
        b = np.where(left, e, b)
        a = np.where(left, a, c)
    fc, fe = objective(a), objective(b)
    value = np.maximum(objective(0.5 * (a + b)), np.maximum(fc, fe))
    return np.where(active, np.maximum(value, 0.0), 0.0)


def conjugate_field(
    nf: NFunction, x_points: np.ndarray, L_field: np.ndarray, params: Optional[ConjugateParams] = None
) -> np.ndarray:
    """M*(x, L) for many points at once.

    Args:
        nf: N-function
        x_points: Points of shape (P, d), or broadcastable to L_field's leading axes
        L_field: Matrices of shape (P, d, d)
        params: Conjugation parameters

    Returns:
        Array of shape (P,)
    """
    params = params or ConjugateParams()
    L = symmetrize(L_field)
    if nf.closed_form_conjugate is not None:
        return np.asarray(nf.closed_form_conjugate(np.asarray(x_points, dtype=float), L), dtype=float)
    s = frobenius(L)
    x = np.broadcast_to(np.asarray(x_points, dtype=float), s.shape + (nf.dim,))
    if nf.is_isotropic:
        return _radial_conjugate_batch(nf, x, s, params)
    flat_x = x.reshape(-1, nf.dim)
    flat_L = L.reshape(-1, nf.dim, nf.dim)
    values = [conjugate_value(nf, xi, Li, params) for xi, Li in zip(flat_x, flat_L)]
    return np.asarray(values, dtype=float).reshape(s.shape)


def conjugate_nfunction(nf: NFunction, params: Optional[ConjugateParams] = None) -> NFunction:
    """The complementary function M* packaged as an NFunction."""
    params = params or ConjugateParams()

    def evaluator(x, L):
        L = np.asarray(L, dtype=float)
        x = np.asarray(x, dtype=float)
        if L.ndim == 2:
            return conjugate_field(nf, x[None, :] if x.ndim == 1 else x, L[None], params)[0]
        return conjugate_field(nf, x, L, params)

    radial = None
    if nf.is_isotropic:

        def radial(x, s):
            s = np.asarray(s, dtype=float)
            x = np.broadcast_to(np.asarray(x, dtype=float), s.shape + (nf.dim,))
            if nf.closed_form_conjugate is not None:
                L = np.zeros(s.shape + (nf.dim, nf.dim))
                L[..., 0, 0] = s
                return nf.closed_form_conjugate(x, L)
            return _radial_conjugate_batch(nf, x, np.abs(s), params)

    # M <= c |K|^P + C gives M*(L) >= (P c)^(1 - Q) |L|^Q / Q - C with Q = P / (P - 1),
    # and M >= c |K|^p - C gives the matching upper bound on M*
    p = nf.lower_power
    q = p / (p - 1.0)
    lower_power, lower_const, offset = q, None, 0.0
    if nf.upper_const is not None:
        P = nf.upper_power
        lower_power = P / (P - 1.0)
        lower_const = (P * nf.upper_const) ** (1.0 - lower_power) / lower_power
        offset = nf.upper_offset
    upper_const = None
    if nf.lower_const is not None:
        upper_const = (p * nf.lower_const) ** (1.0 - q) / q
    return NFunction(
        evaluator=evaluator,
        dim=nf.dim,
        lower_power=lower_power,
        lower_const=lower_const,
        offset=offset,
        kind=NFunctionKind.CUSTOM,
        closed_form_conjugate=None,
        radial=radial,
        name=f"conj({nf.name})",
        params={"primal": nf},
        upper_power=q if upper_const is not None else None,
        upper_const=upper_const,
        upper_offset=nf.offset if upper_const is not None else 0.0,
    )


def fenchel_young_gap(
    nf: NFunction, x: Any, K: np.ndarray, L: np.ndarray, params: Optional[ConjugateParams] = None
) -> float:
    """M(x, K) + M*(x, L) - K:L, nonnegative up to rounding."""
    x = _as_point(x, nf.dim)
    K = _check_matrix(K, nf.dim, "K")
    L = _check_matrix(L, nf.dim, "L")
    return evaluate(nf, x, K) + conjugate(nf, x, L, params) - float(contract(K, L))


def fenchel_young_gap_field(
    nf: NFunction, x_points: np.ndarray, K: np.ndarray, L: np.ndarray, params: Optional[ConjugateParams] = None
) -> np.ndarray:
    """Vectorized Fenchel-Young gap over many points."""
    K = symmetrize(K)
    L = symmetrize(L)
    return nf(x_points, K) + conjugate_field(nf, x_points, L, params) - contract(K, L)


# ---------------------------------------------------------------------------
# Sampled structural checks
# ---------------------------------------------------------------------------


@dataclass
class SampleSpec:
    """How to sample (x, K) when probing structural properties."""

    x_points: np.ndarray
    direction_count: int = 16
    radii: np.ndarray = field(default_factory=lambda: np.geomspace(1e-3, 1e2, 16))
    triple_count: int = 200
    seed: int = 0
    tol: float = 1e-10
    slope_tol: float = 0.1
    delta2_growth_factor: float = 2.0

    def __post_init__(self):
        self.x_points = np.atleast_2d(np.asarray(self.x_points, dtype=float))
        self.radii = np.sort(np.asarray(self.radii, dtype=float))
        if self.x_points.size == 0 or self.direction_count < 1 or self.radii.size < 3:
            raise InvalidInputError("sample spec needs x points, directions and at least three radii")
        if np.any(self.radii <= 0):
            raise InvalidInputError("radii must be positive")


@dataclass
class AxiomCheck:
    """Outcome of one sampled property."""

    name: str
    passed: bool
    worst: float
    witness: Dict[str, Any] = field(default_factory=dict)


@dataclass
class AxiomReport:
    """Per-axiom verdicts plus the doubling statistic."""

    nfunction: str
    checks: Dict[str, AxiomCheck]
    delta2_ratios: List[float]
    delta2_verdict: Delta2Verdict
    small_slope: float
    large_slope: float
    seed: int

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks.values())

    def to_rows(self) -> List[Dict[str, Any]]:
        rows = [
            {"check": c.name, "passed": c.passed, "worst": c.worst, "witness": repr(c.witness)}
            for c in self.checks.values()
        ]
        rows.append({"check": "delta2", "passed": self.delta2_verdict is Delta2Verdict.PLAUSIBLE,
                     "worst": max(self.delta2_ratios), "witness": self.delta2_verdict.value})
        return rows


def _witness(x, K, value) -> Dict[str, Any]:
    return {"x": np.round(np.asarray(x), 6).tolist(), "K": np.round(np.asarray(K), 6).tolist(), "value": float(value)}


def check_axioms(nf: NFunction, sample_spec: SampleSpec) -> AxiomReport:
    """Sample the N-function axioms, the coercive lower bound and the doubling condition."""
    rng = np.random.default_rng(sample_spec.seed)
    xs = _as_point(sample_spec.x_points, nf.dim)
    dirs = random_symmetric_directions(rng, sample_spec.direction_count, nf.dim)
    radii = sample_spec.radii
    tol = sample_spec.tol
    checks: Dict[str, AxiomCheck] = {}

    # grid of (x, direction, radius)
    X = xs[:, None, None, :]
    K = radii[None, None, :, None, None] * dirs[None, :, None, :, :]
    Xb = np.broadcast_to(X, K.shape[:-2] + (nf.dim,))
    with np.errstate(over="ignore", invalid="ignore"):
        M_pos = np.asarray(nf(Xb, K), dtype=float)
        M_neg = np.asarray(nf(Xb, -K), dtype=float)

    zero = np.asarray(nf(xs, np.zeros((xs.shape[0], nf.dim, nf.dim))), dtype=float)
    finite = np.isfinite(M_pos)
    positive = np.all(M_pos[finite] > 0)
    zero_worst = float(np.max(np.abs(zero)))
    checks["zero"] = AxiomCheck("zero", zero_worst == 0.0 and bool(positive), zero_worst)

    even = np.where(finite, np.abs(M_pos - M_neg) / (1.0 + np.abs(M_pos)), 0.0)
    idx = np.unravel_index(np.argmax(even), even.shape)
    checks["evenness"] = AxiomCheck(
        "evenness", float(even[idx]) <= tol, float(even[idx]), _witness(xs[idx[0]], K[idx], M_pos[idx])
    )

    # midpoint convexity on random triples at moderate radii
    n = sample_spec.triple_count
    xi = xs[rng.integers(0, xs.shape[0], n)]
    r_mid = radii[len(radii) // 2]
    K1 = random_symmetric_directions(rng, n, nf.dim) * rng.uniform(0, r_mid, n)[:, None, None]
    K2 = random_symmetric_directions(rng, n, nf.dim) * rng.uniform(0, r_mid, n)[:, None, None]
    lhs = nf(xi, 0.5 * (K1 + K2))
    rhs = 0.5 * (nf(xi, K1) + nf(xi, K2))
    excess = (lhs - rhs) / (1.0 + np.abs(rhs))
    j = int(np.argmax(excess))
    checks["convexity"] = AxiomCheck(
        "convexity", float(excess[j]) <= tol, float(excess[j]), _witness(xi[j], K1[j], lhs[j])
    )

    # superlinearity: M(rE)/r small at the bottom rung, large at the top rung
    slopes = np.where(finite, M_pos / radii[None, None, :], np.inf)
    small_slope = float(np.max(slopes[..., 0]))
    large_slope = float(np.min(slopes[..., -1]))
    checks["superlinearity"] = AxiomCheck(
        "superlinearity",
        small_slope <= sample_spec.slope_tol and large_slope >= 1.0 / sample_spec.slope_tol,
        large_slope,
        {"small_slope": small_slope, "large_slope": large_slope},
    )

    # coercive lower bound M >= c_low |K|^p - C_tilde
    if nf.lower_const is not None:
        bound = nf.lower_const * radii[None, None, :] ** nf.lower_power - nf.offset
        deficit = np.where(finite, (bound - M_pos) / (1.0 + np.abs(bound)), -np.inf)
        idx = np.unravel_index(np.argmax(deficit), deficit.shape)
        checks["lower_bound"] = AxiomCheck(
            "lower_bound", float(deficit[idx]) <= tol, float(deficit[idx]), _witness(xs[idx[0]], K[idx], M_pos[idx])
        )
    else:
        logger.debug(f"[NFunction] {nf.name} declares no coercive bound; lower_bound not checked")

    # doubling statistic per rung
    with np.errstate(over="ignore", invalid="ignore"):
        M_double = np.asarray(nf(Xb, 2.0 * K), dtype=float)
        ratio = M_double / (M_pos + 1.0)
    ratio = np.where(np.isnan(ratio), np.inf, ratio)
    ratios = [float(v) for v in np.max(ratio, axis=(0, 1))]
    top = ratios[-3:]
    growing = top[0] < top[1] < top[2]
    runaway = (not np.isfinite(top[-1])) or top[-1] > sample_spec.delta2_growth_factor * top[0]
    verdict = Delta2Verdict.VIOLATED if (growing and runaway) or not np.isfinite(top[-1]) else Delta2Verdict.PLAUSIBLE

    report = AxiomReport(
        nfunction=nf.name,
        checks=checks,
        delta2_ratios=ratios,
        delta2_verdict=verdict,
        small_slope=small_slope,
        large_slope=large_slope,
        seed=sample_spec.seed,
    )
    logger.info(
        f"[NFunction] Axioms for {nf.name}: "
        f"{'all passed' if report.passed else 'failures present'}, {verdict.value}"
    )
    return report


def conjugate_table(
    nf: NFunction,
    x_points: np.ndarray,
    L_samples: np.ndarray,
    params: Optional[ConjugateParams] = None,
) -> List[Dict[str, float]]:
    """Rows (x-coords..., L-entries..., M_star_value) for every (x, L) pair.

    The value column always holds the numerical conjugate.
    """
    params = params or ConjugateParams()
    xs = np.atleast_2d(np.asarray(x_points, dtype=float))
    Ls = symmetrize(np.asarray(L_samples, dtype=float))
    if xs.shape[0] != Ls.shape[0]:
        raise InvalidInputError("need one L sample per x point")
    rows = []
    for x, L in zip(xs, Ls):
        row = {f"x{i + 1}": float(c) for i, c in enumerate(x)}
        for a in range(nf.dim):
            for b in range(nf.dim):
                row[f"L{a + 1}{b + 1}"] = float(L[a, b])
        row["M_star_value"] = conjugate_value(nf, x, L, params)
        rows.append(row)
    return rows
