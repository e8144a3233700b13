"""Loading of the documented material-parameter file.

The parameter file is the single source of material values (with literature
citations inline); model code never hard-codes them.  Operations that bake
material assumptions into published numbers refuse to run without it.
"""

from __future__ import annotations

from importlib import resources

from ._toml import load_toml
from .cavity import CavityDesign, MaterialSet
from .errors import ConfigError

COATINGS = ("conventional", "crystalline")
STANDARD_LENGTHS_M = {"21cm": 0.21, "50cm": 0.50}


def default_materials_path():
    return resources.files("lunasil").joinpath("data/materials.toml")


def load_materials_file(path=None) -> dict:
    """Parse the material-parameter TOML file and check its structure."""
    p = path if path is not None else default_materials_path()
    data = load_toml(p)
    for section in ("substrate", "spacer", "expansion", "coating"):
        if section not in data:
            raise ConfigError(f"{p}: missing [{section}] section")
    for coat in COATINGS:
        if coat not in data["coating"]:
            raise ConfigError(f"{p}: missing [coating.{coat}] section")
    return data


def material_set(coating: str, data: dict | None = None, overrides: dict | None = None) -> MaterialSet:
    """Build a :class:`MaterialSet` for one coating type.

    Args:
        coating: ``"conventional"`` or ``"crystalline"``.
        data: Parsed parameter file (defaults to the packaged one).
        overrides: Optional flat mapping of :class:`MaterialSet` field names
            to replacement values.

    Returns:
        The assembled material set.
    """
    if coating not in COATINGS:
        raise ConfigError(f"unknown coating type {coating!r}; expected one of {COATINGS}")
    if data is None:
        data = load_materials_file()
    sub = data["substrate"]
    spacer = data["spacer"]
    exp = data["expansion"]
    coat = data["coating"][coating]
    try:
        fields = dict(
            sub_young_pa=float(sub["young_pa"]),
            sub_poisson=float(sub["poisson"]),
            sub_loss=float(sub["loss"]),
            spacer_loss=float(spacer["loss"]),
            spacer_outer_radius_m=float(spacer["outer_radius_m"]),
            spacer_bore_radius_m=float(spacer["bore_radius_m"]),
            coat_name=coating,
            coat_loss=float(coat["loss"]),
            coat_young_pa=float(coat["young_pa"]),
            coat_poisson=float(coat["poisson"]),
            coat_thickness_m=float(coat["thickness_m"]),
            cte_slope_per_k2=float(exp["slope_per_k2"]),
            cte_zero_k=float(exp.get("zero_k", 17.0)),
            cte_window_k=float(exp.get("window_k", 3.0)),
        )
    except KeyError as exc:
        raise ConfigError(f"material file missing key {exc.args[0]!r}") from None
    if overrides:
        unknown = set(overrides) - set(fields)
        if unknown:
            raise ConfigError(f"unknown material override(s): {sorted(unknown)}")
        fields.update({k: float(v) for k, v in overrides.items()})
    return MaterialSet(**fields)


def standard_design(coating: str, length_key: str, data: dict | None = None) -> CavityDesign:
    """One of the four study variants (coating x {21cm, 50cm}).

    Both lengths reuse the same mirror pair (one flat, one 10 m concave);
    only the spacer length changes.
    """
    if length_key not in STANDARD_LENGTHS_M:
        raise ConfigError(f"unknown length key {length_key!r}")
    return CavityDesign(
        name=f"{coating}_{length_key}",
        length_m=STANDARD_LENGTHS_M[length_key],
        materials=material_set(coating, data=data),
    )


def standard_designs(data: dict | None = None) -> dict[str, CavityDesign]:
    """All four study variants keyed by ``<coating>_<length>``."""
    if data is None:
        data = load_materials_file()
    out = {}
    for length_key in STANDARD_LENGTHS_M:
        for coating in COATINGS:
            d = standard_design(coating, length_key, data=data)
            out[d.name] = d
    return out


def reference_floors(data: dict | None = None) -> dict[str, float]:
    """Published target floors for the four variants, for comparison output."""
    if data is None:
        data = load_materials_file()
    try:
        table = data["reference_floors"]
    except KeyError:
        raise ConfigError("material file has no [reference_floors] section") from None
    return {k: float(v) for k, v in table.items()}
