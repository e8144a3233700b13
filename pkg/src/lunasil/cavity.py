"""Cavity optical geometry and silicon thermo-mechanical response.

The resonator model is the standard two-mirror Gaussian treatment via the
g-parameters ``g_i = 1 - L/R_i``; the thermal response uses the linearised
expansion coefficient of single-crystal silicon around its low-temperature
zero crossing.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

from .constants import DEFAULT_WAVELENGTH_M
from .errors import ModelRangeWarning, ValidationError


@dataclass(frozen=True)
class MaterialSet:
    """Material parameters entering the noise and thermal-response models.

    Loss angles are dimensionless; moduli in Pa; lengths in m.  The
    expansion model is ``alpha(T) = cte_slope_per_k2 * (T - cte_zero_k)``,
    valid within ``+-cte_window_k`` of the zero crossing.
    """

    sub_young_pa: float
    sub_poisson: float
    sub_loss: float
    spacer_loss: float
    spacer_outer_radius_m: float
    spacer_bore_radius_m: float
    coat_name: str
    coat_loss: float
    coat_young_pa: float
    coat_poisson: float
    coat_thickness_m: float
    cte_slope_per_k2: float
    cte_zero_k: float = 17.0
    cte_window_k: float = 3.0

    def __post_init__(self):
        if self.sub_young_pa <= 0 or self.coat_young_pa <= 0:
            raise ValidationError("Young's moduli must be > 0")
        if not (-1.0 < self.sub_poisson < 0.5) or not (-1.0 < self.coat_poisson < 0.5):
            raise ValidationError("Poisson ratios must lie in (-1, 0.5)")
        if min(self.sub_loss, self.spacer_loss, self.coat_loss) < 0:
            raise ValidationError("loss angles must be >= 0")
        if not (0 <= self.spacer_bore_radius_m < self.spacer_outer_radius_m):
            raise ValidationError("need 0 <= bore radius < outer radius")
        if self.coat_thickness_m <= 0:
            raise ValidationError("coating thickness must be > 0")
        if self.cte_window_k <= 0:
            raise ValidationError("cte_window_k must be > 0")


@dataclass(frozen=True)
class CavityDesign:
    """One cavity variant: geometry, operating point, and materials."""

    name: str
    length_m: float
    materials: MaterialSet
    roc1_m: float = math.inf
    roc2_m: float = 10.0
    wavelength_m: float = DEFAULT_WAVELENGTH_M
    t_operate_k: float = 17.0

    def __post_init__(self):
        if self.length_m <= 0:
            raise ValidationError("length_m must be > 0")
        if self.wavelength_m <= 0:
            raise ValidationError("wavelength_m must be > 0")
        if self.t_operate_k <= 0:
            raise ValidationError("t_operate_k must be > 0")

    def with_length(self, length_m: float, name: str | None = None) -> "CavityDesign":
        return replace(self, length_m=length_m, name=name or self.name)


@dataclass(frozen=True)
class ModeGeometry:
    """Resonator g-parameters and 1/e^2 intensity spot radii at the mirrors."""

    g1: float
    g2: float
    w1_m: float
    w2_m: float


def _g(length_m: float, roc_m: float) -> float:
    if math.isinf(roc_m):
        return 1.0
    return 1.0 - length_m / roc_m


def mode_geometry(design: CavityDesign) -> ModeGeometry:
    """Compute the fundamental-mode spot radii at both mirrors.

    Uses ``w_i^2 = (L lam / pi) * sqrt(g_j / (g_i (1 - g1 g2)))``.  The
    resonator must be strictly stable, ``0 < g1 g2 < 1``.

    Args:
        design: Cavity under evaluation.

    Returns:
        The :class:`ModeGeometry` for the design.

    Raises:
        ValidationError: If the design is outside the stability region
            (including the degenerate boundaries ``g1 g2 = 0`` and ``1``).
    """
    g1 = _g(design.length_m, design.roc1_m)
    g2 = _g(design.length_m, design.roc2_m)
    prod = g1 * g2
    if not (0.0 < prod < 1.0):
        raise ValidationError(
            f"resonator unstable: g1*g2 = {prod:.6g} outside (0, 1) "
            f"(L = {design.length_m} m, R1 = {design.roc1_m} m, "
            f"R2 = {design.roc2_m} m)"
        )
    scale = design.length_m * design.wavelength_m / math.pi
    w1 = math.sqrt(scale * math.sqrt(g2 / (g1 * (1.0 - prod))))
    w2 = math.sqrt(scale * math.sqrt(g1 / (g2 * (1.0 - prod))))
    return ModeGeometry(g1=g1, g2=g2, w1_m=w1, w2_m=w2)


def _check_window(materials: MaterialSet, t_k: float):
    if abs(t_k - materials.cte_zero_k) > materials.cte_window_k:
        warnings.warn(
            f"temperature {t_k:.3f} K is outside the +-{materials.cte_window_k} K "
            "validity window of the linearised expansion model",
            ModelRangeWarning,
            stacklevel=3,
        )


def cte(design: CavityDesign, t_k: float) -> float:
    """Linearised thermal expansion coefficient at temperature ``t_k`` (1/K).

    Zero at the crossing temperature by construction; a ``ModelRangeWarning``
    is emitted outside the documented validity window.
    """
    if t_k <= 0:
        raise ValidationError("t_k must be > 0")
    m = design.materials
    _check_window(m, t_k)
    return m.cte_slope_per_k2 * (t_k - m.cte_zero_k)


def fractional_length_shift(design: CavityDesign, t_k: float) -> float:
    """Fractional length change ``dL/L`` between the zero crossing and ``t_k``.

    Integral of the linearised expansion coefficient:
    ``dL/L = (slope / 2) (t - t0)^2``.  Positive means the cavity got longer;
    the fractional frequency shift is the negative of this value.
    """
    if t_k <= 0:
        raise ValidationError("t_k must be > 0")
    m = design.materials
    _check_window(m, t_k)
    dt = t_k - m.cte_zero_k
    return 0.5 * m.cte_slope_per_k2 * dt * dt
