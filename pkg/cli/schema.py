"""
The JSON run-config document.

Every field has a default, so `{}` is a valid config (d = 2, N = 32,
power-law stress with p = 2.2). Unknown keys are rejected.
"""

from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class DomainSection(Section):
    dim: Literal[2, 3] = 2
    points: int = Field(32, ge=8)
    oversample: int = Field(2, ge=1)

    @field_validator("points")
    @classmethod
    def _even(cls, v: int) -> int:
        if v % 2:
            raise ValueError("must be even")
        return v


class BasisSection(Section):
    velocity_modes: int = Field(16, ge=1)
    temperature_modes: int = Field(16, ge=1)


class TimeSection(Section):
    T: float = Field(1.0, gt=0)
    dt: float = Field(1e-2, gt=0)
    epsilon: Optional[float] = Field(None, ge=0)
    cadence: int = Field(1, ge=1)
    cfl_limit: float = Field(0.5, gt=0)

    @model_validator(mode="after")
    def _final_time_covers_a_step(self):
        if self.T < self.dt:
            raise ValueError(f"T = {self.T} is shorter than dt = {self.dt}")
        return self


class ViscositySection(Section):
    mu0: float = Field(1.0, gt=0)
    a: float = 0.0
    b: float = 0.0
    mu_low: Optional[float] = Field(None, gt=0)
    mu_high: Optional[float] = Field(None, gt=0)


class NFunctionSection(Section):
    """Explicit N-function paired with the stress instead of the built-in pairing."""

    kind: Literal["isotropic-power", "carreau", "exponential"] = "isotropic-power"
    p: float = Field(2.2, gt=1)
    scale: float = Field(1.0, gt=0)


class StressSection(Section):
    kind: Literal["power-law", "carreau", "variable-exponent", "anisotropic-separable"] = "power-law"
    p: float = Field(2.2, gt=1)
    p_min: float = Field(2.2, gt=1)
    p_max: float = Field(3.0, gt=1)
    exponent: Optional[str] = None
    exponents: Optional[List[List[float]]] = None
    viscosity: ViscositySection = Field(default_factory=ViscositySection)
    nfunction: Optional[NFunctionSection] = None

    @model_validator(mode="after")
    def _kind_fields(self):
        if self.kind == "variable-exponent" and self.p_min > self.p_max:
            raise ValueError(f"p_min = {self.p_min} exceeds p_max = {self.p_max}")
        if self.kind == "anisotropic-separable" and self.exponents is None:
            raise ValueError("anisotropic-separable stress needs an exponents matrix")
        if self.kind == "carreau" and self.p < 2:
            raise ValueError("carreau stress needs p >= 2")
        return self


class HeatSection(Section):
    kappa_low: float = Field(1.0, gt=0)
    kappa_high: float = Field(1.0, gt=0)
    beta: float = 0.0
    viscous_heating: bool = True


class InitialDataSection(Section):
    rho0: str = "1"
    rho_low: float = Field(0.5, gt=0)
    rho_high: float = Field(1.5, gt=0)
    u0: Optional[List[str]] = None
    theta0: str = "1"
    theta_low: float = Field(0.5, gt=0)
    forcing: Optional[List[str]] = None


class DiagnosticsSection(Section):
    thermal_lambda: float = Field(0.5, gt=0, lt=1)
    luxemburg_stride: int = Field(10, ge=1)
    nikolskii_multiples: Optional[List[int]] = None
    bounds_tol: float = Field(0.01, gt=0)
    mass_tol: float = Field(1e-10, gt=0)
    admissibility_samples: int = Field(10_000, ge=1)
    admissibility_pairs: int = Field(10_000, ge=1)


class ConjugateSection(Section):
    sample_count: int = Field(200, ge=1)
    radius_max: float = Field(10.0, gt=0)
    ascent_tol: float = Field(1e-8, gt=0)
    radius_cap: float = Field(1e6, gt=0)
    multistart_count: int = Field(8, ge=1)


class OutputSection(Section):
    directory: str = "output"
    snapshots: bool = False


class RunDocument(Section):
    """Top-level run config."""

    name: str = "run"
    seed: int = Field(0, ge=0)
    domain: DomainSection = Field(default_factory=DomainSection)
    basis: BasisSection = Field(default_factory=BasisSection)
    time: TimeSection = Field(default_factory=TimeSection)
    stress: StressSection = Field(default_factory=StressSection)
    heat: HeatSection = Field(default_factory=HeatSection)
    initial_data: InitialDataSection = Field(default_factory=InitialDataSection)
    diagnostics: DiagnosticsSection = Field(default_factory=DiagnosticsSection)
    conjugate: ConjugateSection = Field(default_factory=ConjugateSection)
    output: OutputSection = Field(default_factory=OutputSection)
