"""
Modulars, Luxemburg norms and modular-convergence diagnostics for tensor
fields sampled on a space-time quadrature grid.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from core.errors import InvalidInputError
from core.nfunction import ConjugateParams, NFunction, conjugate_nfunction, contract

logger = logging.getLogger(__name__)

BISECTION_MAX_ITERS = 200


@dataclass
class SampledField:
    """Samples of a field over time x space with their quadrature weights.

    Attributes:
        values: Array of shape (n_times, n_points, *component_shape)
        x_points: Spatial coordinates, shape (n_points, d)
        quad_weights: Weights of shape (n_times, n_points), units dt * dx^d
    """

    values: np.ndarray
    x_points: np.ndarray
    quad_weights: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.x_points = np.atleast_2d(np.asarray(self.x_points, dtype=float))
        self.quad_weights = np.asarray(self.quad_weights, dtype=float)
        if self.values.ndim < 2:
            raise InvalidInputError("field values need (time, space) leading axes")
        if self.quad_weights.shape != self.values.shape[:2]:
            raise InvalidInputError(
                f"weights {self.quad_weights.shape} do not match samples {self.values.shape[:2]}"
            )
        if self.x_points.shape[0] != self.values.shape[1]:
            raise InvalidInputError("one spatial point per space sample is required")
        if np.any(self.quad_weights <= 0):
            raise InvalidInputError("quadrature weights must be positive")

    @classmethod
    def from_snapshots(
        cls,
        snapshots: Sequence[np.ndarray],
        x_points: np.ndarray,
        cell_volume: float,
        times: Optional[Sequence[float]] = None,
        duration: float = 1.0,
    ) -> "SampledField":
        """Stack per-time snapshots of shape (n_points, ...) into a sampled field.

        With several times the weights follow the composite trapezoid rule;
        a single snapshot stands for a field constant over `duration`.
        """
        values = np.stack([np.asarray(s, dtype=float) for s in snapshots])
        n_times, n_points = values.shape[:2]
        if n_times == 1 or times is None:
            time_w = np.full(n_times, duration / n_times)
        else:
            t = np.asarray(times, dtype=float)
            if t.shape != (n_times,) or np.any(np.diff(t) <= 0):
                raise InvalidInputError("times must be strictly increasing, one per snapshot")
            gaps = np.diff(t)
            time_w = np.zeros(n_times)
            time_w[:-1] += 0.5 * gaps
            time_w[1:] += 0.5 * gaps
        weights = np.outer(time_w, np.full(n_points, cell_volume))
        return cls(values=values, x_points=x_points, quad_weights=weights)

    @property
    def component_shape(self):
        return self.values.shape[2:]

    @property
    def measure(self) -> float:
        return float(self.quad_weights.sum())

    def with_values(self, values: np.ndarray) -> "SampledField":
        return SampledField(values=values, x_points=self.x_points, quad_weights=self.quad_weights)

    def scaled(self, factor: float) -> "SampledField":
        return self.with_values(self.values * factor)

    def pointwise_norm(self) -> np.ndarray:
        """|value| per sample (Frobenius for matrices, Euclidean for vectors)."""
        axes = tuple(range(2, self.values.ndim))
        if not axes:
            return np.abs(self.values)
        return np.sqrt(np.sum(self.values**2, axis=axes))


def _check_matrix_field(nf: NFunction, fld: SampledField):
    if fld.component_shape != (nf.dim, nf.dim):
        raise InvalidInputError(
            f"{nf.name} needs ({nf.dim}, {nf.dim}) samples, field has {fld.component_shape}"
        )
    if fld.x_points.shape[1] != nf.dim:
        raise InvalidInputError("spatial dimension of the field does not match the N-function")


def _integrand(nf: NFunction, fld: SampledField, values: Optional[np.ndarray] = None) -> np.ndarray:
    vals = fld.values if values is None else values
    with np.errstate(over="ignore", invalid="ignore"):
        out = np.asarray(nf(fld.x_points[None, :, :], vals), dtype=float)
    return np.where(np.isnan(out), np.inf, out)


def modular(nf: NFunction, fld: SampledField) -> float:
    """Quadrature value of the integral of M(x, K(t, x)) over space-time."""
    _check_matrix_field(nf, fld)
    with np.errstate(over="ignore", invalid="ignore"):
        return float(np.sum(fld.quad_weights * _integrand(nf, fld)))


def luxemburg_norm(nf: NFunction, fld: SampledField, tol: float = 1e-10) -> float:
    """inf{lam > 0 : modular(field / lam) <= 1} by bracketed bisection.

    Args:
        nf: N-function
        fld: Matrix-valued sampled field
        tol: Relative width at which the bisection stops

    Returns:
        The upper end of the final bracket, where the modular is at most 1
    """
    if not tol > 0:
        raise InvalidInputError(f"tol must be positive, got {tol}")
    _check_matrix_field(nf, fld)
    if not np.all(np.isfinite(fld.values)):
        raise InvalidInputError("field has non-finite samples")
    if not np.any(fld.values):
        return 0.0

    def rho(lam: float) -> float:
        return modular(nf, fld.with_values(fld.values / lam))

    lo = hi = 1.0
    if rho(1.0) > 1.0:
        while rho(hi) > 1.0:
            lo, hi = hi, 2.0 * hi
    else:
        while rho(lo) <= 1.0:
            hi, lo = lo, 0.5 * lo
            if lo < 1e-300:
                return hi
    for _ in range(BISECTION_MAX_ITERS):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi or (hi - lo) <= 0.25 * tol * 1e-4 * hi:
            break
        if rho(mid) > 1.0:
            lo = mid
        else:
            hi = mid
    return hi


@dataclass
class ConvergenceRow:
    """Per-index entries of a modular-convergence report."""

    j: int
    modular: float
    measure_tail: List[float]
    integrability_tail: List[float]
    l1_tail: List[float]


@dataclass
class ConvergenceReport:
    """Modular-convergence diagnostics for a sequence against its limit."""

    lambda_scale: float
    delta_ladder: np.ndarray
    r_ladder: np.ndarray
    rows: List[ConvergenceRow]
    sup_integrability_tail: List[float]
    sup_l1_tail: List[float]
    sup_modular: float
    notes: List[str] = field(default_factory=list)

    @property
    def modulars(self) -> List[float]:
        return [row.modular for row in self.rows]

    def to_rows(self) -> List[Dict[str, Any]]:
        out = []
        for row in self.rows:
            entry: Dict[str, Any] = {"j": row.j, "modular": row.modular}
            for delta, value in zip(self.delta_ladder, row.measure_tail):
                entry[f"measure_gt_{delta:.3g}"] = value
            for r, value in zip(self.r_ladder, row.integrability_tail):
                entry[f"tail_ge_{r:.3g}"] = value
            out.append(entry)
        return out


def modular_convergence_check(
    nf: NFunction,
    sequence: Sequence[SampledField],
    limit: SampledField,
    lambda_scale: float = 1.0,
    delta_ladder: Optional[np.ndarray] = None,
    r_ladder: Optional[np.ndarray] = None,
) -> ConvergenceReport:
    """Report modular convergence of `sequence` to `limit`.

    For each j: the modular of (z_j - z)/lambda_scale, the measure of
    {|z_j - z| > delta} on a delta-ladder, and the integrability tail of
    M(x, lambda_scale z_j) on an R-ladder. The supremum over j of the tail
    is the uniform-integrability curve; the L1 tail of |z_j| accompanies the
    note emitted when the modulars of z_j stay bounded.
    """
    if not sequence:
        raise InvalidInputError("sequence must not be empty")
    if not lambda_scale > 0:
        raise InvalidInputError(f"lambda_scale must be positive, got {lambda_scale}")
    _check_matrix_field(nf, limit)
    for member in sequence:
        _check_matrix_field(nf, member)
        if member.values.shape != limit.values.shape or not np.allclose(
            member.quad_weights, limit.quad_weights
        ):
            raise InvalidInputError("all fields must share one grid")
    delta_ladder = np.geomspace(1e-6, 1e1, 12) if delta_ladder is None else np.asarray(delta_ladder)
    r_ladder = np.geomspace(1e-2, 1e4, 12) if r_ladder is None else np.asarray(r_ladder)

    rows: List[ConvergenceRow] = []
    own_modulars = []
    for j, member in enumerate(sequence, start=1):
        diff = member.with_values((member.values - limit.values) / lambda_scale)
        diff_modular = modular(nf, diff)
        gap = member.with_values(member.values - limit.values).pointwise_norm()
        measure_tail = [float(np.sum(member.quad_weights[gap > d])) for d in delta_ladder]

        m_vals = _integrand(nf, member, member.values * lambda_scale)
        weighted = member.quad_weights * m_vals
        integrability_tail = [float(np.sum(weighted[m_vals >= r])) for r in r_ladder]

        size = member.pointwise_norm()
        l1_tail = [float(np.sum((member.quad_weights * size)[size >= r])) for r in r_ladder]

        own_modulars.append(modular(nf, member))
        rows.append(ConvergenceRow(j, diff_modular, measure_tail, integrability_tail, l1_tail))

    sup_tail = np.max([row.integrability_tail for row in rows], axis=0).tolist()
    sup_l1 = np.max([row.l1_tail for row in rows], axis=0).tolist()
    sup_modular = float(np.max(own_modulars))
    notes = []
    if np.isfinite(sup_modular):
        notes.append(
            f"sup_j modular(z_j) = {sup_modular:.6g} is finite: the sequence is uniformly integrable"
        )
    report = ConvergenceReport(
        lambda_scale=lambda_scale,
        delta_ladder=delta_ladder,
        r_ladder=r_ladder,
        rows=rows,
        sup_integrability_tail=sup_tail,
        sup_l1_tail=sup_l1,
        sup_modular=sup_modular,
        notes=notes,
    )
    logger.debug(f"[Orlicz] Convergence check over {len(rows)} fields, last modular {rows[-1].modular:.3g}")
    return report


def search_modular_lambda(
    nf: NFunction,
    sequence: Sequence[SampledField],
    limit: SampledField,
    lambdas: Optional[Sequence[float]] = None,
    tol: float = 1e-6,
) -> Optional[float]:
    """Smallest lambda_scale in the ladder under which the differences converge modularly.

    A candidate qualifies when the modulars of (z_j - z)/lambda are finite,
    nonincreasing in j and end below `tol`. Returns None if none qualifies.
    """
    lambdas = sorted(np.geomspace(1e-2, 1e2, 9) if lambdas is None else lambdas)
    for lam in lambdas:
        values = modular_convergence_check(nf, sequence, limit, lam).modulars
        if np.all(np.isfinite(values)) and np.all(np.diff(values) <= 1e-15) and values[-1] < tol:
            return float(lam)
    return None


@dataclass
class MembershipProfile:
    """Modular of lambda * K along a ladder of scalings decreasing to 0."""

    lambdas: List[float]
    modulars: List[float]
    finite_modular: bool
    vanishing: bool


def membership_profile(
    nf: NFunction, fld: SampledField, lambdas: Optional[Sequence[float]] = None, tol: float = 1e-8
) -> MembershipProfile:
    """Classify a field against the Orlicz class and the Musielak-Orlicz space.

    The field lies in the Orlicz class when its modular is finite, and the
    profile vanishes when the modular of lambda * K decreases to below `tol`
    as lambda -> 0.
    """
    lambdas = sorted(np.geomspace(1e-6, 1.0, 13) if lambdas is None else lambdas, reverse=True)
    values = [modular(nf, fld.scaled(lam)) for lam in lambdas]
    finite = bool(np.isfinite(values[0]))
    vanishing = bool(np.all(np.isfinite(values)) and np.all(np.diff(values) <= 0) and values[-1] < tol)
    return MembershipProfile(list(map(float, lambdas)), values, finite, vanishing)


@dataclass
class HolderCheck:
    """Discrete Orlicz-Hoelder inequality |(K, L)| <= 2 |K|_M |L|_M*."""

    pairing: float
    norm_primal: float
    norm_conjugate: float
    passed: bool

    @property
    def bound(self) -> float:
        return 2.0 * self.norm_primal * self.norm_conjugate


def orlicz_holder_check(
    nf: NFunction,
    K_field: SampledField,
    L_field: SampledField,
    params: Optional[ConjugateParams] = None,
    tol: float = 1e-10,
) -> HolderCheck:
    """Check the Hoelder inequality between an N-function and its complement."""
    if K_field.values.shape != L_field.values.shape:
        raise InvalidInputError("K and L fields must share one grid")
    pairing = float(np.sum(K_field.quad_weights * contract(K_field.values, L_field.values)))
    norm_k = luxemburg_norm(nf, K_field, tol)
    norm_l = luxemburg_norm(conjugate_nfunction(nf, params), L_field, tol)
    passed = abs(pairing) <= 2.0 * norm_k * norm_l * (1.0 + 1e-8) + tol
    return HolderCheck(pairing, norm_k, norm_l, passed)

