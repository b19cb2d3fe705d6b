"""
Config loading: JSON text -> RunDocument -> SimConfig with the hypothesis verdict attached.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
from pydantic import ValidationError

from cli.schema import RunDocument
from core import constitutive, nfunction as nfn
from core.constitutive import HeatFluxModel, StressModel, Viscosity, validate_hypotheses
from core.errors import ConfigParseError, InvalidInputError, SchemaViolationError
from core.nfunction import ConjugateParams, NFunction
from solver.state import InitialData, SimConfig
from spectral.grid import TorusGrid
from utils.expressions import compile_expression, grid_field, time_field, VARIABLES

logger = logging.getLogger(__name__)


def _apply_overrides(data: Dict[str, Any], overrides: Dict[str, Any]) -> None:
    """Set dotted keys such as 'time.cadence' in the raw document."""
    for dotted, value in overrides.items():
        if value is None:
            continue
        *parents, leaf = dotted.split(".")
        node = data
        for key in parents:
            node = node.setdefault(key, {})
            if not isinstance(node, dict):
                raise SchemaViolationError(key, "must be an object")
        node[leaf] = value


def parse_document(text: str, overrides: Optional[Dict[str, Any]] = None) -> RunDocument:
    """Parse and validate config text.

    Raises:
        ConfigParseError: The text is not JSON (carries line and column)
        SchemaViolationError: A field violates the schema (carries the dotted field path)
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigParseError(e.msg, e.lineno, e.colno) from e
    if not isinstance(data, dict):
        raise SchemaViolationError("config", "top level must be a JSON object")
    _apply_overrides(data, overrides or {})
    try:
        return RunDocument.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(part) for part in first["loc"]) or "config"
        raise SchemaViolationError(field, first["msg"]) from e


def load_document(path: Union[str, Path], overrides: Optional[Dict[str, Any]] = None) -> RunDocument:
    """Read a config file into a validated RunDocument."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InvalidInputError(f"cannot read config {path}: {e}") from e
    document = parse_document(text, overrides)
    logger.debug(f"[Loader] Parsed {path}")
    return document


def _nfunction_override(document: RunDocument, dim: int) -> Optional[NFunction]:
    section = document.stress.nfunction
    if section is None:
        return None
    if section.kind == "isotropic-power":
        return nfn.isotropic_power(section.p, dim, section.scale)
    if section.kind == "carreau":
        return nfn.carreau(section.p, dim, section.scale)
    return nfn.exponential(dim)


def _exponent_field(text: str, dim: int):
    fn = compile_expression(text, VARIABLES[:dim], "stress.exponent")

    def exponent(x):
        x = np.asarray(x, dtype=float)
        return fn(*np.moveaxis(x, -1, 0))

    return exponent


def build_stress(document: RunDocument, dim: int) -> StressModel:
    """Stress model for the document's stress section."""
    section = document.stress
    v = section.viscosity
    try:
        viscosity = Viscosity(mu0=v.mu0, a=v.a, b=v.b, mu_low=v.mu_low, mu_high=v.mu_high)
    except InvalidInputError as e:
        raise SchemaViolationError("stress.viscosity", str(e)) from e
    try:
        if section.kind == "power-law":
            return constitutive.power_law(section.p, dim, viscosity, _nfunction_override(document, dim))
        if section.kind == "carreau":
            return constitutive.carreau(section.p, dim, viscosity, _nfunction_override(document, dim))
        if section.kind == "variable-exponent":
            exponent = _exponent_field(section.exponent, dim) if section.exponent else None
            return constitutive.variable_exponent_law(section.p_min, section.p_max, dim, exponent, viscosity)
        if len(section.exponents) != dim or any(len(row) != dim for row in section.exponents):
            raise SchemaViolationError("stress.exponents", f"must be a {dim}x{dim} matrix")
        return constitutive.anisotropic_law(section.exponents, viscosity)
    except SchemaViolationError:
        raise
    except InvalidInputError as e:
        raise SchemaViolationError("stress", str(e)) from e


def _components(exprs, dim: int, label: str):
    if exprs is None:
        return ["0"] * dim
    if len(exprs) != dim:
        raise SchemaViolationError(label, f"needs {dim} components, got {len(exprs)}")
    return exprs


def build_initial_data(document: RunDocument, grid: TorusGrid) -> InitialData:
    """Evaluate the initial-data expressions on the grid."""
    section = document.initial_data
    dim = grid.dim
    coords = grid.coords
    fields = {}
    for label in ("rho0", "theta0"):
        try:
            fields[label] = grid_field(getattr(section, label), coords, label)
        except InvalidInputError as e:
            raise SchemaViolationError(f"initial_data.{label}", str(e)) from e
    u_exprs = _components(section.u0, dim, "initial_data.u0")
    try:
        u0 = np.stack([grid_field(text, coords, f"u0[{i}]") for i, text in enumerate(u_exprs)])
    except InvalidInputError as e:
        raise SchemaViolationError("initial_data.u0", str(e)) from e

    forcing = None
    if section.forcing is not None:
        f_exprs = _components(section.forcing, dim, "initial_data.forcing")
        try:
            parts = [time_field(text, dim, f"forcing[{i}]") for i, text in enumerate(f_exprs)]
        except InvalidInputError as e:
            raise SchemaViolationError("initial_data.forcing", str(e)) from e

        def forcing(t, xs):
            return np.stack([g(t, xs) for g in parts])

    data = InitialData(
        rho0=fields["rho0"],
        u0=u0,
        theta0=fields["theta0"],
        rho_low=section.rho_low,
        rho_high=section.rho_high,
        theta_low=section.theta_low,
        forcing=forcing,
    )
    try:
        data.validate(grid)
    except InvalidInputError as e:
        field = "initial_data.u0" if "u0" in str(e) else "initial_data"
        raise SchemaViolationError(field, str(e)) from e
    return data


def conjugate_params(document: RunDocument) -> ConjugateParams:
    c = document.conjugate
    return ConjugateParams(
        radius_cap=c.radius_cap,
        ascent_tol=c.ascent_tol,
        multistart_count=c.multistart_count,
        seed=document.seed,
    )


def build_config(document: RunDocument) -> SimConfig:
    """Resolve a validated document into a SimConfig and attach the hypothesis verdict.

    Failed hypotheses are logged as warnings; the run is still allowed.
    """
    d = document.domain
    grid = TorusGrid(d.dim, d.points, d.oversample)
    stress = build_stress(document, d.dim)
    h = document.heat
    try:
        heat = HeatFluxModel(h.kappa_low, h.kappa_high, h.beta)
    except InvalidInputError as e:
        raise SchemaViolationError("heat", str(e)) from e
    data = build_initial_data(document, grid)
    params = conjugate_params(document)
    t = document.time
    diag = document.diagnostics
    try:
        config = SimConfig(
            grid=grid,
            stress=stress,
            heat=heat,
            initial_data=data,
            T=t.T,
            dt=t.dt,
            epsilon=t.epsilon,
            n_velocity=document.basis.velocity_modes,
            n_temperature=document.basis.temperature_modes,
            cadence=t.cadence,
            cfl_limit=t.cfl_limit,
            viscous_heating=h.viscous_heating,
            thermal_lambda=diag.thermal_lambda,
            luxemburg_stride=diag.luxemburg_stride,
            bounds_tol=diag.bounds_tol,
            mass_tol=diag.mass_tol,
            seed=document.seed,
            conjugate_params=params,
            name=document.name,
        )
    except SchemaViolationError:
        raise
    except InvalidInputError as e:
        raise SchemaViolationError("config", str(e)) from e

    config.verdict = validate_hypotheses(stress, heat, d.dim, data, params)
    if not config.verdict.passed:
        logger.warning(
            f"[Loader] {document.name}: existence hypotheses fail, results are flagged: "
            + "; ".join(f"{c.name} ({c.detail})" for c in config.verdict.failures)
        )
    return config


def load_config(path: Union[str, Path], overrides: Optional[Dict[str, Any]] = None) -> SimConfig:
    """Load a JSON run config into a SimConfig with its hypothesis verdict attached.

    Args:
        path: Config file
        overrides: Dotted-key replacements applied before validation (e.g. {"time.cadence": 5})

    Raises:
        ConfigParseError: Invalid JSON
        SchemaViolationError: Invalid field values
    """
    return build_config(load_document(path, overrides))
