"""Config-file loading for the command-line front end.

All inputs are TOML documents.  Physical quantities carry unit suffixes in
their key names (``_m``, ``_k``, ``_pa``, ``_w``, ``_s``) and unknown keys
are rejected, so a misspelled or misplaced unit fails loudly instead of
silently defaulting.  Relative file references inside a document resolve
against the document's own directory.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from pathlib import Path

from ._toml import load_toml
from .cavity import CavityDesign
from .environment import (
    PsrEnvironment,
    SeismicSpectrum,
    load_seismic,
    parametric_seismic,
)
from .errors import ConfigError
from .materials import load_materials_file, material_set
from .thermal import (
    CONDUCTIVE,
    RADIATIVE,
    SWITCHABLE,
    DEFAULT_SIZING_LOADS_W,
    DEFAULT_SIZING_TARGETS_K,
    HeaterServo,
    RADIATOR_EPS,
    ThermalLink,
    ThermalNetwork,
    ThermalNode,
    eps_eff_parallel,
)

try:
    from importlib.resources import files as _ir_files
except ImportError:  # pragma: no cover
    from importlib_resources import files as _ir_files

DEFAULT_DRIFT_PER_S = 5e-20


def packaged_config(name: str) -> Path:
    """Path of a config file shipped inside the package."""
    return Path(str(_ir_files("lunasil").joinpath("data").joinpath(name)))


def _only_keys(table: dict, allowed, where: str):
    unknown = sorted(set(table) - set(allowed))
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {unknown}; allowed: {sorted(allowed)}")


def _get(table: dict, key: str, where: str, default=None, required: bool = False):
    if key in table:
        return table[key]
    if required:
        raise ConfigError(f"{where}: missing required key {key!r}")
    return default


def load_design(path=None, materials_path=None) -> CavityDesign:
    """Build a cavity design from a TOML file.

    The file names a coating from the materials database and the resonator
    geometry; optional ``[materials.overrides]`` entries patch individual
    material parameters.
    """
    src = Path(path) if path is not None else packaged_config("design.toml")
    doc = load_toml(src)
    if "design" not in doc:
        raise ConfigError(f"{src}: missing [design] table")
    d = doc["design"]
    _only_keys(
        d,
        {
            "name",
            "coating",
            "length_m",
            "roc1_m",
            "roc2_m",
            "wavelength_m",
            "t_operate_k",
        },
        f"{src} [design]",
    )
    extra = set(doc) - {"design", "materials"}
    if extra:
        raise ConfigError(f"{src}: unexpected table(s) {sorted(extra)}")
    mat_tbl = doc.get("materials", {})
    _only_keys(mat_tbl, {"path", "overrides"}, f"{src} [materials]")
    mpath = materials_path
    if mpath is None and "path" in mat_tbl:
        mpath = (src.parent / mat_tbl["path"]).resolve()
    data = load_materials_file(mpath)
    coating = _get(d, "coating", src, required=True)
    mats = material_set(coating, data=data, overrides=mat_tbl.get("overrides"))
    length = float(_get(d, "length_m", src, required=True))
    return CavityDesign(
        name=str(_get(d, "name", src, default=f"{coating}_{length:g}m")),
        length_m=length,
        materials=mats,
        roc1_m=float(_get(d, "roc1_m", src, default=math.inf)),
        roc2_m=float(_get(d, "roc2_m", src, default=10.0)),
        wavelength_m=float(_get(d, "wavelength_m", src, default=1.542e-6)),
        t_operate_k=float(_get(d, "t_operate_k", src, default=17.0)),
    )


def _load_seismic_table(tbl: dict, base: Path, where: str) -> SeismicSpectrum:
    _only_keys(
        tbl,
        {"kind", "level", "slope", "f_min_hz", "f_max_hz", "csv", "axis"},
        where,
    )
    kind = _get(tbl, "kind", where, default="flat")
    axis = _get(tbl, "axis", where, default="vertical")
    if kind == "file":
        csv = _get(tbl, "csv", where, required=True)
        return load_seismic((base / csv).resolve(), axis=axis)
    if kind in ("flat", "powerlaw"):
        level = float(_get(tbl, "level", where, required=True))
        slope = float(_get(tbl, "slope", where, default=0.0)) if kind == "powerlaw" else 0.0
        kw = {}
        if "f_min_hz" in tbl:
            kw["f_min"] = float(tbl["f_min_hz"])
        if "f_max_hz" in tbl:
            kw["f_max"] = float(tbl["f_max_hz"])
        return parametric_seismic(level, slope=slope, axis=axis, **kw)
    raise ConfigError(f"{where}: seismic kind must be flat, powerlaw, or file")


def load_environment(path=None) -> PsrEnvironment:
    """Build the site environment from a TOML file."""
    src = Path(path) if path is not None else packaged_config("environment.toml")
    doc = load_toml(src)
    if "environment" not in doc:
        raise ConfigError(f"{src}: missing [environment] table")
    e = doc["environment"]
    _only_keys(
        e,
        {
            "t_min_k",
            "t_max_k",
            "t_drift_k_per_day",
            "pressure_pa",
            "pressure_fluct_pa",
            "horizontal_scale",
            "seismic",
            "seismic_horizontal",
        },
        f"{src} [environment]",
    )
    kw = {}
    for key in ("t_min_k", "t_max_k", "t_drift_k_per_day", "pressure_pa", "pressure_fluct_pa"):
        if key in e:
            kw[key] = float(e[key])
    if "horizontal_scale" in e:
        kw["horizontal_scale"] = float(e["horizontal_scale"])
    if "seismic" in e:
        kw["seismic"] = _load_seismic_table(
            e["seismic"], src.parent, f"{src} [environment.seismic]"
        )
    if "seismic_horizontal" in e:
        kw["seismic_horizontal"] = _load_seismic_table(
            e["seismic_horizontal"], src.parent, f"{src} [environment.seismic_horizontal]"
        )
    return PsrEnvironment(**kw)


_LINK_KEYS = {
    CONDUCTIVE: {"kind", "a", "b", "g_w_per_k"},
    SWITCHABLE: {"kind", "a", "b", "g_w_per_k", "g_off_w_per_k"},
    RADIATIVE: {"kind", "a", "b", "area_m2", "eps_eff", "eps1", "eps2"},
}


def _load_link(tbl: dict, where: str) -> ThermalLink:
    kind = _get(tbl, "kind", where, required=True)
    if kind not in _LINK_KEYS:
        raise ConfigError(f"{where}: unknown link kind {kind!r}")
    _only_keys(tbl, _LINK_KEYS[kind], where)
    a = _get(tbl, "a", where, required=True)
    b = _get(tbl, "b", where, required=True)
    if kind == RADIATIVE:
        if "eps_eff" in tbl:
            if "eps1" in tbl or "eps2" in tbl:
                raise ConfigError(f"{where}: give either eps_eff or the eps1/eps2 pair")
            eps = float(tbl["eps_eff"])
        else:
            eps = eps_eff_parallel(
                float(_get(tbl, "eps1", where, required=True)),
                float(_get(tbl, "eps2", where, required=True)),
            )
        return ThermalLink(
            RADIATIVE, a, b, area_m2=float(_get(tbl, "area_m2", where, required=True)),
            eps_eff=eps,
        )
    return ThermalLink(
        kind,
        a,
        b,
        g_w_per_k=float(_get(tbl, "g_w_per_k", where, required=True)),
        g_off_w_per_k=float(_get(tbl, "g_off_w_per_k", where, default=0.0)),
    )


def load_network(path=None):
    """Build the thermal network and its radiator-sizing defaults.

    Returns:
        ``(network, sizing)`` where ``sizing`` holds ``loads_w``,
        ``targets_k``, ``emissivity``, and ``margin`` for the size command.
    """
    src = Path(path) if path is not None else packaged_config("network.toml")
    doc = load_toml(src)
    if "network" not in doc:
        raise ConfigError(f"{src}: missing [network] table")
    ntab = doc["network"]
    _only_keys(
        ntab,
        {"ambient_node", "switch_threshold_k", "nodes", "links", "servo", "sizing"},
        f"{src} [network]",
    )
    nodes = []
    for i, tbl in enumerate(ntab.get("nodes", [])):
        where = f"{src} [[network.nodes]] #{i}"
        _only_keys(
            tbl,
            {"name", "heat_capacity_j_per_k", "temperature_k", "boundary", "const_load_w"},
            where,
        )
        nodes.append(
            ThermalNode(
                name=str(_get(tbl, "name", where, required=True)),
                heat_capacity_j_per_k=float(_get(tbl, "heat_capacity_j_per_k", where, default=1.0)),
                temperature_k=float(_get(tbl, "temperature_k", where, required=True)),
                boundary=bool(_get(tbl, "boundary", where, default=False)),
                const_load_w=float(_get(tbl, "const_load_w", where, default=0.0)),
            )
        )
    links = [
        _load_link(tbl, f"{src} [[network.links]] #{i}")
        for i, tbl in enumerate(ntab.get("links", []))
    ]
    servo = None
    if "servo" in ntab:
        where = f"{src} [network.servo]"
        stab = ntab["servo"]
        _only_keys(
            stab, {"node", "setpoint_k", "kp_w_per_k", "ki_w_per_k_s", "p_max_w"}, where
        )
        servo = HeaterServo(
            node=str(_get(stab, "node", where, required=True)),
            setpoint_k=float(_get(stab, "setpoint_k", where, default=16.0)),
            kp_w_per_k=float(_get(stab, "kp_w_per_k", where, default=0.02)),
            ki_w_per_k_s=float(_get(stab, "ki_w_per_k_s", where, default=5e-6)),
            p_max_w=float(_get(stab, "p_max_w", where, default=1.0)),
        )
    network = ThermalNetwork(
        nodes=tuple(nodes),
        links=tuple(links),
        servo=servo,
        ambient_node=str(_get(ntab, "ambient_node", src, default="ambient")),
        switch_threshold_k=float(_get(ntab, "switch_threshold_k", src, default=40.0)),
    )
    sizing = {
        "loads_w": list(DEFAULT_SIZING_LOADS_W),
        "targets_k": list(DEFAULT_SIZING_TARGETS_K),
        "emissivity": RADIATOR_EPS,
        "margin": 0.5,
    }
    if "sizing" in ntab:
        where = f"{src} [network.sizing]"
        stab = ntab["sizing"]
        _only_keys(stab, {"loads_w", "targets_k", "emissivity", "margin"}, where)
        if "loads_w" in stab:
            sizing["loads_w"] = [float(v) for v in stab["loads_w"]]
        if "targets_k" in stab:
            sizing["targets_k"] = [float(v) for v in stab["targets_k"]]
        if "emissivity" in stab:
            sizing["emissivity"] = float(stab["emissivity"])
        if "margin" in stab:
            sizing["margin"] = float(stab["margin"])
        if len(sizing["loads_w"]) != len(sizing["targets_k"]):
            raise ConfigError(f"{where}: loads_w and targets_k must have equal length")
    return network, sizing


def config_hash(paths) -> str:
    """12-hex-digit digest over the contents of the given config files.

    Only file contents enter the hash, so renaming or relocating a config
    does not change it, while any edit does.
    """
    h = hashlib.sha256()
    for p in sorted(str(p) for p in paths):
        h.update(hashlib.sha256(Path(p).read_bytes()).digest())
    return h.hexdigest()[:12]


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs: loaded inputs plus provenance."""

    design: CavityDesign
    env: PsrEnvironment
    network: ThermalNetwork
    sizing: dict
    out_dir: Path
    seed: int | None
    fmt: str
    hash: str


def build_run_config(
    design_path=None,
    env_path=None,
    network_path=None,
    materials_path=None,
    out_dir=".",
    seed=None,
    fmt="csv",
) -> RunConfig:
    sources = [
        Path(design_path) if design_path else packaged_config("design.toml"),
        Path(env_path) if env_path else packaged_config("environment.toml"),
        Path(network_path) if network_path else packaged_config("network.toml"),
        Path(materials_path) if materials_path else None,
    ]
    design = load_design(design_path, materials_path=materials_path)
    env = load_environment(env_path)
    network, sizing = load_network(network_path)
    used = [p for p in sources if p is not None]
    return RunConfig(
        design=design,
        env=env,
        network=network,
        sizing=sizing,
        out_dir=Path(out_dir),
        seed=seed,
        fmt=fmt,
        hash=config_hash(used),
    )
