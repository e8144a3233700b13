"""Command-line front end.

Subcommands: ``budget``, ``table2``, ``thermal``, ``modes``, ``simulate``,
``timescale``.  Outputs are CSV (spectra, traces, tables) and JSON
(summaries); every file starts with a provenance line carrying the tool
version, a hash of the config inputs, and the seed.  Given the same
inputs, outputs are byte-identical across runs.

Exit codes: 0 success; 2 config or validation error; 3 solver or
integration failure; 4 a censored or infeasible result was requested as a
hard value.  Errors are reported as one JSON object on standard error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, budget, clocknoise, thermal, timescale
from .cavity import mode_geometry
from .config import DEFAULT_DRIFT_PER_S, build_run_config
from .constants import SECONDS_PER_DAY
from .errors import (
    ConfigError,
    InfeasibleError,
    IntegrationError,
    LunasilError,
    ParseError,
    SolverError,
    ValidationError,
)
from .materials import load_materials_file, reference_floors, standard_designs

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_CENSORED = 4

_TABLE_ORDER = (
    "conventional_21cm",
    "crystalline_21cm",
    "conventional_50cm",
    "crystalline_50cm",
)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _meta(cfg) -> dict:
    return {
        "tool": "lunasil",
        "version": __version__,
        "config": cfg.hash,
        "seed": cfg.seed,
    }


def _header_line(cfg) -> str:
    seed = cfg.seed if cfg.seed is not None else "none"
    return f"# lunasil {__version__} config={cfg.hash} seed={seed}\n"


def _write_csv(cfg, path: Path, names, columns):
    columns = [np.atleast_1d(np.asarray(c)) for c in columns]
    n = columns[0].shape[0]
    lines = [_header_line(cfg), ",".join(names) + "\n"]
    for i in range(n):
        lines.append(",".join(_fmt(c[i]) for c in columns) + "\n")
    path.write_text("".join(lines))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        obj = float(obj)
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return None
    return obj


def _write_json(cfg, path: Path, obj) -> str:
    obj = dict(obj)
    obj["_meta"] = _meta(cfg)
    text = json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"
    path.write_text(text)
    return text


def _print_err(exc, code: int):
    payload = {
        "error": {
            "type": type(exc).__name__,
            "message": str(exc),
            "exit_code": code,
        }
    }
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _require_seed(args):
    if args.seed is None:
        raise ConfigError(f"the {args.command} command requires --seed")


def _cfg_from(args):
    return build_run_config(
        design_path=args.design,
        env_path=args.env,
        network_path=args.network,
        materials_path=args.materials,
        out_dir=args.out,
        seed=args.seed,
        fmt=args.format,
    )


# ---------------------------------------------------------------------------
# budget


def cmd_budget(args) -> int:
    cfg = _cfg_from(args)
    out = _out_dir(args)
    f_grid = np.logspace(
        math.log10(args.fmin), math.log10(args.fmax), args.npoints
    )
    options = budget.BudgetOptions(
        f_hz=f_grid,
        percentile=args.percentile,
        temperature_rms_k=args.temperature_rms,
        temperature_offset_k=args.temperature_offset,
    )
    full = budget.compose_budget(cfg.design, cfg.env, options)
    if args.components is not None:
        wanted = [] if args.components == "none" else args.components.split(",")
        known = {c.name for c in full.components}
        bad = [w for w in wanted if w not in known]
        if bad:
            raise ConfigError(f"unknown component(s) {bad}; available: {sorted(known)}")
        full = dataclasses.replace(
            full, components=tuple(c for c in full.components if c.name in wanted)
        )
    names = ["f_hz"] + [c.name for c in full.components] + ["total"]
    cols = [full.f_hz] + [c.asd_y for c in full.components] + [full.total_asd_y]
    _write_csv(cfg, out / "budget.csv", names, cols)
    summary = {
        "design": full.design_name,
        "allan_floor": full.allan_floor,
        "flicker_h_m1": budget.flicker_coefficient(cfg.design),
        "components": [
            {"name": c.name, "character": c.character} for c in full.components
        ],
        "percentile": args.percentile,
        "f_min_hz": float(f_grid[0]),
        "f_max_hz": float(f_grid[-1]),
    }
    text = _write_json(cfg, out / "budget.json", summary)
    sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# table2


def cmd_table2(args) -> int:
    # An explicit, parseable parameter file is the provenance contract here;
    # never fall back silently.
    data = load_materials_file(args.materials)
    cfg = _cfg_from(args)
    out = _out_dir(args)
    designs = standard_designs(data=data)
    refs = reference_floors(data=data)
    rows = []
    for key in _TABLE_ORDER:
        design = designs[key]
        floor, _ = budget.thermal_floor(design)
        rows.append(
            {
                "design": key,
                "length_m": design.length_m,
                "coating": design.materials.coat_name,
                "floor": floor,
                "reference": refs[key],
                "ratio": floor / refs[key],
            }
        )
    ratio_21_50 = rows[0]["floor"] / rows[2]["floor"]
    if args.format == "json":
        text = _write_json(
            cfg, out / "table2.json", {"rows": rows, "ratio_21cm_50cm_conventional": ratio_21_50}
        )
        sys.stdout.write(text)
    else:
        names = ["design", "length_m", "coating", "floor", "reference", "ratio"]
        cols = list(zip(*[[r[k] for k in names] for r in rows]))
        _write_csv(cfg, out / "table2.csv", names, [list(c) for c in cols])
        sys.stdout.write((out / "table2.csv").read_text())
    return EXIT_OK


# ---------------------------------------------------------------------------
# thermal


def cmd_thermal(args) -> int:
    cfg = _cfg_from(args)
    out = _out_dir(args)
    net = cfg.network
    if args.mode == "steady":
        state = thermal.solve_steady_state(net, ambient_k=args.ambient)
        names = list(state.temps_k)
        _write_csv(
            cfg,
            out / "thermal_steady.csv",
            ["node", "temperature_k"],
            [names, [state.temps_k[n] for n in names]],
        )
        text = _write_json(
            cfg,
            out / "thermal_steady.json",
            {
                "temps_k": state.temps_k,
                "heater_power_w": state.heater_power_w,
                "heater_saturated": state.heater_saturated,
                "residual_w": state.residual_w,
                "iterations": state.iterations,
                "switch_on": state.switch_on,
            },
        )
        sys.stdout.write(text)
        return EXIT_OK
    if args.mode == "transient":
        if args.duration is None or args.dt is None:
            raise ConfigError("thermal transient requires --duration and --dt")
        if args.seasonal:
            ambient = cfg.env.temperature_profile()
        else:
            ambient = args.ambient
        res = thermal.simulate_transient(
            net,
            duration_s=args.duration,
            dt_s=args.dt,
            ambient=ambient,
            record_every=args.record_every,
        )
        names = ["t_s"] + [f"{n}_k" for n in res.node_names] + ["heater_w"]
        cols = [res.times_s] + [res.temps_k[:, i] for i in range(len(res.node_names))]
        cols.append(res.heater_w)
        _write_csv(cfg, out / "thermal_transient.csv", names, cols)
        stored, external = res.energy_closure()
        scale = max(abs(stored), abs(external), abs(res.e_ext_j[-1]), 1e-30)
        text = _write_json(
            cfg,
            out / "thermal_transient.json",
            {
                "final_temps_k": {
                    n: float(res.temps_k[-1, i]) for i, n in enumerate(res.node_names)
                },
                "heater_max_w": float(np.max(res.heater_w)),
                "energy_stored_j": stored,
                "energy_external_j": external,
                "energy_closure_rel": abs(stored - external) / scale,
                "duration_s": args.duration,
                "dt_s": args.dt,
            },
        )
        sys.stdout.write(text)
        return EXIT_OK
    # size
    margin = args.margin if args.margin is not None else cfg.sizing["margin"]
    areas = thermal.size_radiators(
        cfg.sizing["loads_w"],
        cfg.sizing["targets_k"],
        emissivity=cfg.sizing["emissivity"],
        margin=margin,
    )
    heater = thermal.required_heater_power(
        net, ambient_range=(cfg.env.t_min_k, cfg.env.t_max_k), margin=margin
    )
    text = _write_json(
        cfg,
        out / "thermal_size.json",
        {
            "areas_m2": areas,
            "loads_w": cfg.sizing["loads_w"],
            "targets_k": cfg.sizing["targets_k"],
            "emissivity": cfg.sizing["emissivity"],
            "margin": margin,
            "heater": {
                "ambient_k": heater.ambient_k,
                "power_w": heater.power_w,
                "required_w": heater.required_w,
            },
        },
    )
    sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# modes


def cmd_modes(args) -> int:
    cfg = _cfg_from(args)
    out = _out_dir(args)
    geo = mode_geometry(cfg.design)
    payload = {
        "design": cfg.design.name,
        "length_m": cfg.design.length_m,
        "wavelength_m": cfg.design.wavelength_m,
        "g1": geo.g1,
        "g2": geo.g2,
        "g1g2": geo.g1 * geo.g2,
        "w1_m": geo.w1_m,
        "w2_m": geo.w2_m,
    }
    if args.format == "csv":
        keys = list(payload)
        _write_csv(
            cfg, out / "modes.csv", ["parameter", "value"], [keys, [payload[k] for k in keys]]
        )
    text = _write_json(cfg, out / "modes.json", payload)
    sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulate / timescale shared model parsing


def _parse_model(spec: str | None, design) -> clocknoise.PowerLawModel:
    """Model from a CLI spec string.

    ``none`` is the zero model; otherwise comma-separated ``key=value``
    terms with keys ``white`` (h0), ``flicker`` (h-1), ``rw`` (h-2),
    ``drift`` (per second), and ``flicker-floor`` (Allan floor, converted
    to h-1).  Default: the design's thermal flicker floor plus the nominal
    drift rate.
    """
    if spec is None:
        floor, _ = budget.thermal_floor(design)
        return clocknoise.PowerLawModel.from_flicker_floor(
            floor, drift_per_s=DEFAULT_DRIFT_PER_S
        )
    spec = spec.strip()
    if spec == "none":
        return clocknoise.PowerLawModel()
    kw = {"h0": 0.0, "h_m1": 0.0, "h_m2": 0.0, "drift_per_s": 0.0}
    for term in spec.split(","):
        if "=" not in term:
            raise ConfigError(f"bad model term {term!r}; expected key=value")
        key, _, val = term.partition("=")
        key = key.strip()
        try:
            x = float(val)
        except ValueError:
            raise ConfigError(f"bad model value in {term!r}") from None
        if key == "white":
            kw["h0"] = x
        elif key == "flicker":
            kw["h_m1"] = x
        elif key == "rw":
            kw["h_m2"] = x
        elif key == "drift":
            kw["drift_per_s"] = x
        elif key == "flicker-floor":
            kw["h_m1"] = x**2 / (2.0 * math.log(2.0))
        else:
            raise ConfigError(
                f"unknown model key {key!r}; use white, flicker, rw, drift, flicker-floor"
            )
    return clocknoise.PowerLawModel(**kw)


def _model_echo(model: clocknoise.PowerLawModel) -> dict:
    return {
        "h0": model.h0,
        "h_m1": model.h_m1,
        "h_m2": model.h_m2,
        "drift_per_s": model.drift_per_s,
    }


def cmd_simulate(args) -> int:
    _require_seed(args)
    cfg = _cfg_from(args)
    out = _out_dir(args)
    model = _parse_model(args.model, cfg.design)
    dt = args.dt
    n = int(round(args.seconds / dt))
    if n < 2:
        raise ConfigError("simulate needs at least two samples; raise --seconds")
    trace = clocknoise.synthesize(model, n, dt, seed=args.seed)
    t = trace.times()[:-1]
    _write_csv(cfg, out / "trace.csv", ["t_s", "y", "x_s"], [t, trace.y, trace.x[:-1]])
    if args.taus is not None:
        taus = np.array([float(v) for v in args.taus.split(",")])
    else:
        taus = clocknoise.default_taus(trace, variant=args.variant)
    allan = clocknoise.allan_deviation(trace, tau_s=taus, variant=args.variant)
    _write_csv(
        cfg,
        out / "allan.csv",
        ["tau_s", "sigma_y", "dof"],
        [allan.tau_s, allan.sigma_y, allan.dof],
    )
    summary = {
        "model": _model_echo(model),
        "n": n,
        "dt_s": dt,
        "variant": args.variant,
        "final_time_error_s": float(trace.x[-1]),
    }
    if args.coherence:
        res = clocknoise.coherence_time(
            model,
            carrier_hz=args.carrier,
            n_seeds=args.n_seeds,
            n=args.coherence_samples,
            dt_s=args.coherence_dt,
            seed=args.seed,
        )
        if res.censored and not args.allow_censored:
            raise InfeasibleError(
                f"coherence time censored at the simulated span ({res.span_s:g} s); "
                "extend the span or pass --allow-censored"
            )
        summary["coherence"] = {
            "tau_c_s": res.tau_c_s,
            "ci_low_s": res.ci_low_s,
            "ci_high_s": res.ci_high_s,
            "censored": res.censored,
            "carrier_hz": res.carrier_hz,
            "threshold_rad": res.threshold_rad,
            "n_seeds": res.n_seeds,
        }
    text = _write_json(cfg, out / "simulate.json", summary)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_timescale(args) -> int:
    _require_seed(args)
    cfg = _cfg_from(args)
    out = _out_dir(args)
    model = _parse_model(args.model, cfg.design)
    holdover = tuple((float(a), float(b)) for a, b in (args.holdover or ()))
    policy = timescale.SteeringPolicy(
        interrogation_interval_s=args.interval,
        duty_cycle=args.duty,
        servo_time_constant_s=args.servo_tau,
        atomic_white_fm=args.atomic_white,
        holdover_windows=holdover,
        max_correction=args.max_correction,
    )
    duration = args.seconds if args.seconds is not None else args.days * SECONDS_PER_DAY
    report = timescale.simulate_timescale(
        model, policy, duration_s=duration, dt_s=args.dt, seed=args.seed
    )
    t = report.times()[:-1]
    _write_csv(
        cfg,
        out / "timescale.csv",
        ["t_s", "time_error_s", "steered_y"],
        [t, report.time_error_s[:-1], report.steered_y],
    )
    sigma_1day = report.sigma_y_at(SECONDS_PER_DAY)
    summary = {
        "sigma_y_1day": sigma_1day,
        "max_holdover_error_s": report.max_holdover_error_s,
        "final_time_error_s": float(report.time_error_s[-1]),
        "duration_s": duration,
        "dt_s": args.dt,
        "model": _model_echo(model),
        "policy": {
            "interrogation_interval_s": policy.interrogation_interval_s,
            "duty_cycle": policy.duty_cycle,
            "servo_time_constant_s": policy.servo_time_constant_s,
            "atomic_white_fm": policy.atomic_white_fm,
            "holdover_windows": [list(w) for w in policy.holdover_windows],
            "max_correction": policy.max_correction,
        },
        "allan": {"tau_s": report.sigma.tau_s, "sigma_y": report.sigma.sigma_y},
    }
    text = _write_json(cfg, out / "timescale.json", summary)
    sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--design", metavar="FILE", help="cavity design TOML")
    common.add_argument("--env", metavar="FILE", help="environment TOML")
    common.add_argument("--network", metavar="FILE", help="thermal network TOML")
    common.add_argument("--materials", metavar="FILE", help="material parameter TOML")
    common.add_argument("--out", default=".", metavar="DIR", help="output directory")
    common.add_argument("--seed", type=int, default=None, help="base RNG seed")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    parser = argparse.ArgumentParser(
        prog="lunasil",
        description="Cryogenic silicon cavity feasibility toolkit for a "
        "permanently shadowed lunar site.",
    )
    parser.add_argument("--version", action="version", version=f"lunasil {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("budget", parents=[common], help="noise budget spectra")
    p.add_argument("--percentile", choices=("p10", "p50", "p90"), default="p50")
    p.add_argument(
        "--components",
        default=None,
        help="comma list to keep (or 'none' for an empty budget)",
    )
    p.add_argument("--fmin", type=float, default=1e-4)
    p.add_argument("--fmax", type=float, default=10.0)
    p.add_argument("--npoints", type=int, default=101)
    p.add_argument("--temperature-rms", type=float, default=None)
    p.add_argument("--temperature-offset", type=float, default=0.0)
    p.set_defaults(func=cmd_budget)

    p = sub.add_parser("table2", parents=[common], help="thermal floor table, four designs")
    p.set_defaults(func=cmd_table2)

    p = sub.add_parser("thermal", parents=[common], help="thermal network analysis")
    p.add_argument("mode", choices=("steady", "transient", "size"))
    p.add_argument("--ambient", type=float, default=None, help="ambient temperature, K")
    p.add_argument("--duration", type=float, default=None, help="transient span, s")
    p.add_argument("--dt", type=float, default=None, help="transient step, s")
    p.add_argument("--seasonal", action="store_true", help="drive ambient from the environment profile")
    p.add_argument("--record-every", type=int, default=None)
    p.add_argument("--margin", type=float, default=None, help="sizing load margin")
    p.set_defaults(func=cmd_thermal)

    p = sub.add_parser("modes", parents=[common], help="resonator mode geometry")
    p.set_defaults(func=cmd_modes)

    p = sub.add_parser("simulate", parents=[common], help="clock-noise synthesis and Allan analysis")
    p.add_argument("--seconds", type=float, default=86400.0)
    p.add_argument("--dt", type=float, default=1.0)
    p.add_argument("--model", default=None, help="e.g. 'flicker-floor=8e-19,drift=5e-20' or 'none'")
    p.add_argument("--variant", choices=("overlapping", "modified"), default="overlapping")
    p.add_argument("--taus", default=None, help="comma list of averaging times, s")
    p.add_argument("--coherence", action="store_true", help="estimate laser coherence time")
    p.add_argument("--carrier", type=float, default=1.944e14, help="optical carrier, Hz")
    p.add_argument("--n-seeds", type=int, default=200)
    p.add_argument("--coherence-samples", type=int, default=8192)
    p.add_argument("--coherence-dt", type=float, default=1.0)
    p.add_argument("--allow-censored", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("timescale", parents=[common], help="steered timescale simulation")
    p.add_argument("--days", type=float, default=10.0)
    p.add_argument("--seconds", type=float, default=None)
    p.add_argument("--dt", type=float, default=60.0)
    p.add_argument("--model", default=None)
    p.add_argument("--interval", type=float, default=600.0, help="interrogation interval, s")
    p.add_argument("--duty", type=float, default=0.5)
    p.add_argument("--servo-tau", type=float, default=3600.0)
    p.add_argument("--atomic-white", type=float, default=3e-16)
    p.add_argument("--max-correction", type=float, default=1e-12)
    p.add_argument(
        "--holdover",
        nargs=2,
        action="append",
        metavar=("START_S", "END_S"),
        help="suspend steering over [START_S, END_S); repeatable",
    )
    p.set_defaults(func=cmd_timescale)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ParseError, ValidationError) as exc:
        _print_err(exc, EXIT_CONFIG)
        return EXIT_CONFIG
    except (SolverError, IntegrationError) as exc:
        _print_err(exc, EXIT_SOLVER)
        return EXIT_SOLVER
    except InfeasibleError as exc:
        _print_err(exc, EXIT_CENSORED)
        return EXIT_CENSORED
    except LunasilError as exc:  # pragma: no cover - safety net
        _print_err(exc, 1)
        return 1


if __name__ == "__main__":
    sys.exit(main())
