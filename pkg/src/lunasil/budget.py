"""Fractional-frequency noise budget for a cavity design at the lunar site.

Components:

* Brownian thermal noise of the two mirrors (substrate + coating) and the
  spacer, converted to fractional frequency; flicker-frequency character, so
  the budget's headline number is the flat Allan-deviation floor
  ``sigma_y = sqrt(2 ln 2 * f * S_y(f))``.
* Seismic vibration coupling through the per-axis acceleration sensitivities.
* Refractive-index pull of the residual gas (density-scaled dry-air
  refractivity).
* A bound for temperature fluctuations through the quadratic expansion model.

The mirror Brownian term follows the thin-coating formulation of Harry et
al. (2002) with equal parallel/perpendicular coating loss; the spacer term
follows Numata et al. (2004).  Material values come from the documented
parameter file, never from code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .cavity import CavityDesign, mode_geometry
from .constants import DEFAULT_WAVELENGTH_M, G_STD, K_B, P_REF_PA, T_REF_K
from .environment import PsrEnvironment, SeismicSpectrum
from .errors import ValidationError

DEFAULT_F_GRID = np.logspace(-4.0, 1.0, 101)

# Character tags for budget components.
FLICKER_FM = "flicker_fm"
WHITE_FM = "white_fm"
EMPIRICAL = "empirical"
BOUND = "bound"


@dataclass(frozen=True)
class NoiseComponent:
    """One named contribution to the budget: ASD of y vs frequency."""

    name: str
    f_hz: np.ndarray
    asd_y: np.ndarray
    character: str = EMPIRICAL

    def __post_init__(self):
        f = np.asarray(self.f_hz, dtype=float)
        a = np.asarray(self.asd_y, dtype=float)
        if f.shape != a.shape or f.ndim != 1:
            raise ValidationError("component grid and ASD must be 1-d and matching")
        if np.any(f <= 0.0):
            raise ValidationError("component frequencies must be positive")
        if np.any(a < 0.0) or not np.all(np.isfinite(a)):
            raise ValidationError("component ASD must be finite and >= 0")
        object.__setattr__(self, "f_hz", f)
        object.__setattr__(self, "asd_y", a)


@dataclass(frozen=True)
class NoiseBudget:
    """A set of components on a common grid plus the thermal Allan floor."""

    design_name: str
    f_hz: np.ndarray
    components: tuple
    allan_floor: float

    @property
    def total_asd_y(self) -> np.ndarray:
        total_sq = np.zeros_like(np.asarray(self.f_hz, dtype=float))
        for comp in self.components:
            total_sq = total_sq + comp.asd_y**2
        return np.sqrt(total_sq)

    def component(self, name: str) -> NoiseComponent:
        for comp in self.components:
            if comp.name == name:
                return comp
        raise KeyError(name)


# ---------------------------------------------------------------------------
# Brownian thermal noise


def _substrate_base(f, t_k, w_m, young, poisson):
    # Common prefactor (2 k T / (pi^{3/2} f)) (1 - sigma^2) / (w Y); multiply
    # by a loss angle to get a displacement PSD.
    return (2.0 * K_B * t_k / (math.pi**1.5 * f)) * (1.0 - poisson**2) / (w_m * young)


def coating_correction(young, poisson, coat_young, coat_poisson) -> float:
    """Elastic mismatch factor of the thin-coating Brownian formulation.

    Reduces to the familiar ``2 (1 - 2 sigma) / (1 - sigma)`` when coating
    and substrate moduli match.
    """
    num = (
        coat_young**2 * (1.0 + poisson) ** 2 * (1.0 - 2.0 * poisson) ** 2
        + young**2 * (1.0 + coat_poisson) ** 2 * (1.0 - 2.0 * coat_poisson)
    )
    den = young * coat_young * (1.0 - coat_poisson**2) * (1.0 - poisson**2)
    return num / den


def brownian_displacement_psd(design: CavityDesign, f) -> dict:
    """One-sided displacement PSD of cavity length, split by origin.

    Args:
        design: Cavity design (materials and geometry).
        f: Fourier frequency or array, Hz (> 0).

    Returns:
        Dict with ``substrate``, ``coating``, ``spacer`` and ``total`` PSDs
        in m^2/Hz; mirror terms are summed over both mirrors.
    """
    f = np.asarray(f, dtype=float)
    if np.any(f <= 0.0):
        raise ValidationError("frequencies must be positive")
    m = design.materials
    geom = mode_geometry(design)
    t = design.t_operate_k

    sub = np.zeros_like(f)
    coat = np.zeros_like(f)
    q = coating_correction(m.sub_young_pa, m.sub_poisson, m.coat_young_pa, m.coat_poisson)
    for w in (geom.w1_m, geom.w2_m):
        base = _substrate_base(f, t, w, m.sub_young_pa, m.sub_poisson)
        sub = sub + base * m.sub_loss
        coat = coat + base * (m.coat_thickness_m / (math.sqrt(math.pi) * w)) * q * m.coat_loss

    area = m.spacer_outer_radius_m**2 - m.spacer_bore_radius_m**2
    spacer = (
        (2.0 * K_B * t / (math.pi * f))
        * m.spacer_loss
        * design.length_m
        / (3.0 * math.pi * m.sub_young_pa * area)
    )
    return {
        "substrate": sub,
        "coating": coat,
        "spacer": spacer,
        "total": sub + coat + spacer,
    }


def fractional_asd_from_displacement(asd_x, length_m: float):
    """Convert a length-noise ASD (m/sqrt(Hz)) to fractional frequency.

    Exact 1/L scaling: ``asd_y = asd_x / L``.
    """
    if length_m <= 0.0:
        raise ValidationError("length_m must be > 0")
    return np.asarray(asd_x, dtype=float) / length_m


def flicker_coefficient(design: CavityDesign) -> float:
    """``h_-1`` such that ``S_y(f) = h_-1 / f`` for the Brownian budget."""
    s_x = brownian_displacement_psd(design, 1.0)["total"]
    return float(s_x) / design.length_m**2


def thermal_floor(design: CavityDesign, f_hz=None):
    """Brownian thermal-noise floor of a design.

    Args:
        design: Cavity design.
        f_hz: Optional frequency grid for the returned component.

    Returns:
        ``(allan_floor, component)``: the flat Allan deviation
        ``sqrt(2 ln 2 * h_-1)`` and the flicker-character
        :class:`NoiseComponent` with ``asd_y(f) = sqrt(h_-1 / f)``.
    """
    f = np.asarray(DEFAULT_F_GRID if f_hz is None else f_hz, dtype=float)
    h_m1 = flicker_coefficient(design)
    comp = NoiseComponent(
        name="thermal", f_hz=f, asd_y=np.sqrt(h_m1 / f), character=FLICKER_FM
    )
    floor = math.sqrt(2.0 * math.log(2.0) * h_m1)
    return floor, comp


# ---------------------------------------------------------------------------
# Vibration coupling


@dataclass(frozen=True)
class AccelSensitivity:
    """Fractional-frequency response per g of acceleration, by axis."""

    vertical_per_g: float
    horizontal1_per_g: float
    horizontal2_per_g: float

    def __post_init__(self):
        for v in (self.vertical_per_g, self.horizontal1_per_g, self.horizontal2_per_g):
            if v < 0.0:
                raise ValidationError("sensitivities must be >= 0")


# Demonstrated support performance for the 21 cm design.
DEFAULT_SENSITIVITY_21CM = AccelSensitivity(
    vertical_per_g=1.5e-11, horizontal1_per_g=1.0e-10, horizontal2_per_g=3.0e-11
)
_REF_FROM_M = 0.21
_REF_TO_M = 0.50
_REF_FACTOR = 5.0


def scale_sensitivity_for_length(
    sens: AccelSensitivity, from_length_m: float, to_length_m: float, factor: float | None = None
) -> AccelSensitivity:
    """Rescale support sensitivities when the spacer length changes.

    The default factor is anchored at the documented 0.21 m -> 0.50 m
    degradation of x5 and interpolated as a power law in the length ratio,
    which makes the conversion exactly invertible.
    """
    if from_length_m <= 0.0 or to_length_m <= 0.0:
        raise ValidationError("lengths must be > 0")
    if factor is None:
        if to_length_m == from_length_m:
            factor = 1.0
        else:
            exponent = math.log(to_length_m / from_length_m) / math.log(_REF_TO_M / _REF_FROM_M)
            factor = _REF_FACTOR**exponent
    return AccelSensitivity(
        vertical_per_g=sens.vertical_per_g * factor,
        horizontal1_per_g=sens.horizontal1_per_g * factor,
        horizontal2_per_g=sens.horizontal2_per_g * factor,
    )


def vibration_noise(
    sensitivity: AccelSensitivity,
    seismic: SeismicSpectrum,
    percentile: str = "p50",
    f_hz=None,
    horizontal: SeismicSpectrum | None = None,
    horizontal_scale: float = 1.0,
) -> NoiseComponent:
    """Fractional-frequency ASD induced by ground acceleration.

    Per-axis contributions ``(k_axis / g) * a_asd(f)`` added in quadrature.
    The horizontal axes reuse the vertical spectrum (scaled by
    ``horizontal_scale``) unless a dedicated horizontal spectrum is given.

    Args:
        sensitivity: Per-axis response in fractional frequency per g.
        seismic: Vertical-axis acceleration spectrum.
        percentile: Which percentile column to use.
        f_hz: Evaluation grid (defaults to the module grid).
        horizontal: Optional horizontal-axis spectrum.
        horizontal_scale: Multiplier on the horizontal spectrum.

    Returns:
        The vibration :class:`NoiseComponent`.
    """
    f = np.asarray(DEFAULT_F_GRID if f_hz is None else f_hz, dtype=float)
    a_v = np.asarray(seismic.asd(f, percentile))
    spec_h = horizontal if horizontal is not None else seismic
    a_h = horizontal_scale * np.asarray(spec_h.asd(f, percentile))
    asd = (
        np.sqrt(
            (sensitivity.vertical_per_g * a_v) ** 2
            + (sensitivity.horizontal1_per_g * a_h) ** 2
            + (sensitivity.horizontal2_per_g * a_h) ** 2
        )
        / G_STD
    )
    return NoiseComponent(name="vibration", f_hz=f, asd_y=asd, character=EMPIRICAL)


# ---------------------------------------------------------------------------
# Residual-gas and temperature terms


def air_refractivity(wavelength_m: float = DEFAULT_WAVELENGTH_M) -> float:
    """Dry-air refractivity n - 1 at the reference state (101325 Pa, 288.15 K).

    Standard two-resonance dispersion fit; wavelength in m.
    """
    if wavelength_m <= 0.0:
        raise ValidationError("wavelength_m must be > 0")
    sig_sq = (1e-6 / wavelength_m) ** 2  # inverse microns, squared
    return 1e-8 * (8342.13 + 2406030.0 / (130.0 - sig_sq) + 15997.0 / (38.9 - sig_sq))


def pressure_sensitivity(t_k: float, wavelength_m: float = DEFAULT_WAVELENGTH_M) -> float:
    """|dy/dP| of the cavity resonance from residual-gas refractivity (1/Pa).

    Ideal-gas density scaling of the reference refractivity:
    ``(n-1)_ref / P_ref * (T_ref / t)``.  The sign convention is that the
    resonance frequency decreases as pressure rises; the magnitude is
    returned.
    """
    if t_k <= 0.0:
        raise ValidationError("t_k must be > 0")
    return air_refractivity(wavelength_m) / P_REF_PA * (T_REF_K / t_k)


def temperature_noise(design: CavityDesign, t_rms_k: float, offset_k: float = 0.0) -> float:
    """Bound on |y| excursions from temperature noise near the zero crossing.

    For rms fluctuation ``t_rms`` about an operating point ``offset`` away
    from the zero crossing: ``|slope| * (|offset| * t_rms + t_rms^2 / 2)``.
    """
    if t_rms_k < 0.0:
        raise ValidationError("t_rms_k must be >= 0")
    a = abs(design.materials.cte_slope_per_k2)
    return a * (abs(offset_k) * t_rms_k + 0.5 * t_rms_k**2)


# ---------------------------------------------------------------------------
# Budget composition


@dataclass(frozen=True)
class BudgetOptions:
    """Knobs for :func:`compose_budget`."""

    f_hz: np.ndarray = field(default_factory=lambda: DEFAULT_F_GRID.copy())
    percentile: str = "p50"
    sensitivity: AccelSensitivity | None = None
    temperature_rms_k: float | None = None
    temperature_offset_k: float = 0.0
    extra_components: tuple = ()


def default_sensitivity_for(design: CavityDesign) -> AccelSensitivity:
    """Demonstrated 21 cm sensitivities, power-law scaled to the design length."""
    return scale_sensitivity_for_length(DEFAULT_SENSITIVITY_21CM, _REF_FROM_M, design.length_m)


def compose_budget(
    design: CavityDesign, env: PsrEnvironment, options: BudgetOptions | None = None
) -> NoiseBudget:
    """Assemble the full budget for a design in an environment.

    Components share one frequency grid; the total is their quadrature sum.
    A temperature component (flat, bound character) is included only when
    ``options.temperature_rms_k`` is set.

    Returns:
        The :class:`NoiseBudget`.
    """
    opts = options if options is not None else BudgetOptions()
    f = np.asarray(opts.f_hz, dtype=float)
    if f.ndim != 1 or f.size == 0 or np.any(f <= 0.0):
        raise ValidationError("budget grid must be 1-d with positive frequencies")

    floor, thermal = thermal_floor(design, f_hz=f)
    sens = opts.sensitivity if opts.sensitivity is not None else default_sensitivity_for(design)
    vib = vibration_noise(
        sens,
        env.seismic,
        percentile=opts.percentile,
        f_hz=f,
        horizontal=env.seismic_horizontal,
        horizontal_scale=env.horizontal_scale,
    )
    press_level = pressure_sensitivity(design.t_operate_k, design.wavelength_m) * env.pressure_fluct_pa
    pressure = NoiseComponent(
        name="pressure",
        f_hz=f,
        asd_y=np.full_like(f, press_level),
        character=WHITE_FM,
    )
    components = [thermal, vib, pressure]
    if opts.temperature_rms_k is not None:
        level = temperature_noise(design, opts.temperature_rms_k, opts.temperature_offset_k)
        components.append(
            NoiseComponent(
                name="temperature", f_hz=f, asd_y=np.full_like(f, level), character=BOUND
            )
        )
    for comp in opts.extra_components:
        if comp.f_hz.shape != f.shape or not np.array_equal(comp.f_hz, f):
            comp = replace(comp, f_hz=f, asd_y=np.interp(f, comp.f_hz, comp.asd_y))
        components.append(comp)
    return NoiseBudget(
        design_name=design.name, f_hz=f, components=tuple(components), allan_floor=floor
    )
