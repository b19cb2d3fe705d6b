"""
Run loop: density -> momentum -> temperature per step, records at the output cadence.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from core.constitutive import HypothesisVerdict
from core.errors import AbortedRunError, LabError, StepRejectedError
from core.schema import RunStatus
from diagnostics.records import DiagnosticsRecord, DiagnosticsRecorder
from solver.density import DensityStepper
from solver.momentum import MomentumStepper
from solver.state import SimConfig, SimContext, SimState
from solver.temperature import TemperatureStepper

logger = logging.getLogger(__name__)


@dataclass
class Trajectory:
    """Output of a run: the record stream, the states at the same times, and the context."""

    context: SimContext
    records: List[DiagnosticsRecord] = field(default_factory=list)
    snapshots: List[SimState] = field(default_factory=list)
    status: RunStatus = RunStatus.PENDING
    final_state: Optional[SimState] = None

    @property
    def config(self) -> SimConfig:
        return self.context.config

    @property
    def verdict(self) -> Optional[HypothesisVerdict]:
        return self.context.config.verdict

    @property
    def flagged(self) -> bool:
        """True when the run went ahead despite failed existence hypotheses."""
        return self.verdict is not None and not self.verdict.passed

    @property
    def times(self) -> np.ndarray:
        return np.array([r.t for r in self.records])


class Simulation:
    """Two-level Galerkin time stepper for one configuration."""

    def __init__(self, config: SimConfig, audit_logger=None):
        """Initialize the simulation.

        Args:
            config: Run configuration
            audit_logger: Optional RunAuditLogger receiving lifecycle events
        """
        self.config = config
        self.context = SimContext(config)
        self.density = DensityStepper(self.context)
        self.momentum = MomentumStepper(self.context)
        self.temperature = TemperatureStepper(self.context)
        self.audit_logger = audit_logger

    def step(self, state: SimState, dt: float) -> SimState:
        """One Lie-split step."""
        rho_new = self.density.step(state, dt)
        alpha_new = self.momentum.step(state, rho_new, dt)
        nu_new = self.temperature.step(state, rho_new, alpha_new, dt)
        return SimState(state.t + dt, rho_new, alpha_new, nu_new)

    def run(self, on_record: Optional[Callable[[DiagnosticsRecord], None]] = None) -> Trajectory:
        """Integrate from t = 0 to T.

        Raises:
            StepRejectedError: CFL guard tripped (carries the failing time)
            FatalDiagnosticError: A mass matrix lost positive definiteness
            AbortedRunError: The state became non-finite (carries the last good state)
        """
        config = self.config
        trajectory = Trajectory(self.context, status=RunStatus.RUNNING)
        recorder = DiagnosticsRecorder(self.context)
        if trajectory.flagged:
            logger.warning(f"[Simulation] {config.name}: running with failed hypotheses: {config.verdict.summary()}")
        logger.info(
            f"[Simulation] Starting {config.name}: {self.context.grid}, n={config.n_velocity}, "
            f"k={config.n_temperature}, dt={config.dt:g}, T={config.T:g}, eps={self.context.epsilon:.3g}"
        )
        if self.audit_logger:
            self.audit_logger.log_run_start(config)

        state = self.context.initial_state()

        def keep(s: SimState):
            rec = recorder.record(s)
            trajectory.snapshots.append(s.copy())
            if self.audit_logger:
                self.audit_logger.log_record(rec)
            if on_record:
                on_record(rec)

        keep(state)
        try:
            for index in range(config.n_steps):
                new_state = self.step(state, config.step_size(index))
                if not new_state.is_finite():
                    raise AbortedRunError(
                        f"{config.name}: non-finite state at t={new_state.t:.6g}", new_state.t, last_state=state
                    )
                state = new_state
                if (index + 1) % config.cadence == 0 or index == config.n_steps - 1:
                    keep(state)
        except LabError as e:
            trajectory.status = RunStatus.REJECTED if isinstance(e, StepRejectedError) else RunStatus.ABORTED
            trajectory.final_state = state
            trajectory.records = recorder.records
            logger.error(f"[Simulation] {config.name} stopped: {e}")
            if self.audit_logger:
                self.audit_logger.log_error(type(e).__name__, str(e), "run", t=state.t)
            raise

        trajectory.records = recorder.records
        trajectory.final_state = state
        trajectory.status = RunStatus.COMPLETED
        logger.info(
            f"[Simulation] Finished {config.name}: {len(trajectory.records)} records, "
            f"final KE={trajectory.records[-1].kinetic_energy:.6g}"
        )
        if self.audit_logger:
            self.audit_logger.log_run_end(trajectory)
        return trajectory


def run(config: SimConfig, audit_logger=None, on_record=None) -> Trajectory:
    """Run one configuration to its final time."""
    return Simulation(config, audit_logger).run(on_record)
