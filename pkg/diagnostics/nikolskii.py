"""
Time-shift (Nikolskii N^{1/2,2}) seminorm of the velocity from stored snapshots.
"""

import logging
from typing import TYPE_CHECKING, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid

from core.errors import InvalidInputError

if TYPE_CHECKING:
    from workflow.simulation import Trajectory

logger = logging.getLogger(__name__)

LATTICE_TOL = 1e-9


def _lattice(trajectory: "Trajectory") -> Tuple[float, np.ndarray]:
    """Snapshot spacing h and the coefficient rows on the uniform lattice t = j h."""
    config = trajectory.config
    h = config.cadence * config.dt
    alphas = []
    for j, state in enumerate(trajectory.snapshots):
        if abs(state.t - j * h) > LATTICE_TOL * max(1.0, state.t):
            break
        alphas.append(state.alpha)
    if len(alphas) < 2:
        raise InvalidInputError("need at least two snapshots on the output lattice")
    return h, np.asarray(alphas)


def default_multiples(intervals: int) -> List[int]:
    """1, 2, 4, ... up to half the number of stored intervals."""
    out, m = [], 1
    while m <= max(1, intervals // 2):
        out.append(m)
        m *= 2
    return out


def nikolskii_profile(trajectory: "Trajectory", deltas: Optional[Sequence[float]] = None) -> List[Tuple[float, float]]:
    """(delta, delta^{-1/2} (int_0^{T-delta} ||u(s+delta) - u(s)||^2 ds)^{1/2}) per shift.

    The velocity basis is orthonormal, so ||u(s+delta) - u(s)||^2 equals the
    squared distance of the coefficient vectors.

    Raises:
        InvalidInputError: If a shift exceeds the stored time span or is not a
            multiple of the output interval
    """
    h, alphas = _lattice(trajectory)
    intervals = alphas.shape[0] - 1
    span = intervals * h
    if deltas is None:
        multiples = default_multiples(intervals)
    else:
        multiples = []
        for delta in deltas:
            if not 0 < delta <= span * (1.0 + LATTICE_TOL):
                raise InvalidInputError(f"shift {delta} outside (0, {span:g}]")
            m = int(round(delta / h))
            if m < 1 or abs(m * h - delta) > LATTICE_TOL * max(1.0, delta):
                raise InvalidInputError(f"shift {delta} is not a multiple of the output interval {h:g}")
            multiples.append(m)

    profile = []
    for m in multiples:
        diffs = np.sum((alphas[m:] - alphas[:-m]) ** 2, axis=1)
        integral = float(trapezoid(diffs, dx=h)) if diffs.size > 1 else 0.0
        delta = m * h
        profile.append((delta, float(np.sqrt(integral / delta))))
    return profile


def nikolskii_seminorm(trajectory: "Trajectory", deltas: Optional[Sequence[float]] = None) -> float:
    """Supremum of the shifted-difference quotient over the shift ladder."""
    profile = nikolskii_profile(trajectory, deltas)
    value = max(v for _, v in profile)
    logger.debug(f"[Nikolskii] {len(profile)} shifts, seminorm={value:.6g}")
    return value
