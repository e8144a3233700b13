"""Feasibility toolkit for a cryogenic silicon optical cavity operated in a
permanently shadowed lunar crater.

Subpackages cover the noise budget (Brownian thermal floor, seismic
vibration, residual-gas pressure, temperature), the radiative-cooling
thermal network, stochastic clock-noise synthesis with Allan analysis, and
a steered optical timescale.  Hot numerical kernels run through a compiled
extension when it is available and a pure NumPy fallback otherwise; see
``lunasil._kernels.BACKEND``.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .budget import (
    AccelSensitivity,
    BudgetOptions,
    NoiseBudget,
    NoiseComponent,
    air_refractivity,
    brownian_displacement_psd,
    compose_budget,
    default_sensitivity_for,
    flicker_coefficient,
    fractional_asd_from_displacement,
    pressure_sensitivity,
    scale_sensitivity_for_length,
    temperature_noise,
    thermal_floor,
    vibration_noise,
)
from .cavity import CavityDesign, MaterialSet, ModeGeometry, cte, fractional_length_shift, mode_geometry
from .clocknoise import (
    AllanResult,
    ClockTrace,
    CoherenceResult,
    PowerLawModel,
    allan_deviation,
    coherence_time,
    derive_seed,
    ensemble_allan_deviation,
    fit_remove_drift,
    synthesize,
)
from .config import (
    DEFAULT_DRIFT_PER_S,
    RunConfig,
    build_run_config,
    config_hash,
    load_design,
    load_environment,
    load_network,
    packaged_config,
)
from .environment import (
    PsrEnvironment,
    SeismicSpectrum,
    TemperatureProfile,
    default_environment,
    load_seismic,
    parametric_seismic,
    seasonal_temperature,
)
from .errors import (
    ConfigError,
    GridClampWarning,
    InfeasibleError,
    IntegrationError,
    LunasilError,
    ModelRangeWarning,
    ParseError,
    SolverError,
    ValidationError,
)
from .materials import (
    load_materials_file,
    material_set,
    reference_floors,
    standard_design,
    standard_designs,
)
from .thermal import (
    HeaterReport,
    HeaterServo,
    SteadyState,
    ThermalLink,
    ThermalNetwork,
    ThermalNode,
    TransientResult,
    default_network,
    eps_eff_parallel,
    radiative_flux,
    required_heater_power,
    simulate_transient,
    size_radiators,
    solve_steady_state,
)
from .timescale import (
    SteeringPolicy,
    TimescaleReport,
    holdover_error,
    measurement_sigma,
    simulate_timescale,
)

__all__ = [name for name in dir() if not name.startswith("_")]
