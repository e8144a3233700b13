"""Acceptance gate: nine numbered criteria, one verdict line each.

The verdict lines are collected by the conftest terminal-summary hook so a
full run prints a per-criterion pass/fail digest after the usual pytest
output.  Every check asserts after recording, so a failed criterion still
leaves its line in the digest.
"""

import json
import math
import time

import numpy as np

import conftest
from lunasil import (
    AccelSensitivity,
    BudgetOptions,
    PowerLawModel,
    SteeringPolicy,
    allan_deviation,
    coherence_time,
    compose_budget,
    default_environment,
    default_network,
    ensemble_allan_deviation,
    fit_remove_drift,
    fractional_asd_from_displacement,
    parametric_seismic,
    pressure_sensitivity,
    reference_floors,
    required_heater_power,
    simulate_timescale,
    simulate_transient,
    size_radiators,
    solve_steady_state,
    standard_designs,
    synthesize,
    thermal_floor,
    vibration_noise,
)
from lunasil.cli import main as cli_main

DAY = 86400.0


def record(num, desc, failures):
    verdict = "PASS" if not failures else "FAIL"
    line = f"[{verdict}] criterion {num}: {desc}"
    if failures:
        line += " | " + "; ".join(failures)
    conftest.ACCEPTANCE_LINES.append(line)
    assert not failures, line


def check(failures, ok, label):
    if not ok:
        failures.append(label)


def test_criterion_1_table2_reproduction(tmp_path, designs):
    t0 = time.perf_counter()
    code = cli_main(["table2", "--out", str(tmp_path), "--format", "json"])
    elapsed = time.perf_counter() - t0
    fails = []
    check(fails, code == 0, f"exit code {code}")
    doc = json.loads((tmp_path / "table2.json").read_text())
    refs = reference_floors()
    rows = {r["design"]: r for r in doc["rows"]}
    for name, ref in refs.items():
        ratio = rows[name]["floor"] / ref
        check(fails, 0.5 <= ratio <= 2.0, f"{name} floor off by x{ratio:.2f}")
    r = doc["ratio_21cm_50cm_conventional"]
    check(fails, abs(r - 3.0) <= 0.15 * 3.0, f"21/50 ratio {r:.3f}")
    check(fails, elapsed < 1.0, f"runtime {elapsed:.2f} s")
    record(
        1,
        f"four floors within x2 of published, 21/50 ratio {r:.2f}, "
        f"{elapsed * 1e3:.0f} ms",
        fails,
    )


def test_criterion_2_length_conversion_exact():
    rng = np.random.default_rng(7)
    asd_x = 10.0 ** rng.uniform(-18, -15, size=64)
    y21 = fractional_asd_from_displacement(asd_x, 0.21)
    y50 = fractional_asd_from_displacement(asd_x, 0.50)
    rel = np.abs(y21 * 0.21 / (y50 * 0.50) - 1.0)
    fails = []
    check(fails, float(np.max(rel)) < 1e-12, f"max rel error {np.max(rel):.2e}")
    record(2, "fractional ASD scales exactly as 1/L between 0.21 and 0.50 m", fails)


def test_criterion_3_pressure_sensitivity():
    sens = pressure_sensitivity(17.0)
    shift = sens * 1e-10
    fails = []
    check(fails, abs(sens - 4e-8) <= 0.25 * 4e-8, f"dy/dP {sens:.3e} /Pa")
    check(fails, shift <= 5e-18, f"1e-10 Pa maps to {shift:.2e}")
    record(
        3,
        f"dy/dP(17 K) = {sens:.2e} /Pa within 25% of 4e-8, "
        f"1e-10 Pa -> {shift:.2e} <= 5e-18",
        fails,
    )


def test_criterion_4_vibration_arithmetic(designs, env):
    fails = []
    flat = parametric_seismic(1.2e-8)
    vertical_only = AccelSensitivity(1.5e-11, 0.0, 0.0)
    comp = vibration_noise(vertical_only, flat, f_hz=np.array([1.0]))
    got = float(comp.asd_y[0])
    expect = 1.2e-8 * 1.5e-11 / 9.8
    check(fails, abs(got / expect - 1.0) < 1e-6, f"vertical term {got:.6e}")

    band = np.logspace(-2.0, 0.0, 41)
    for name in ("conventional_21cm", "crystalline_21cm"):
        design = designs[name]
        _, thermal = thermal_floor(design, f_hz=band)
        budget = compose_budget(design, env, BudgetOptions(f_hz=band))
        vib = [c for c in budget.components if c.name == "vibration"][0]
        check(
            fails,
            bool(np.all(vib.asd_y < thermal.asd_y)),
            f"vibration not below thermal for {name}",
        )
    record(
        4,
        f"1.2e-8 x 1.5e-11/g / 9.8 = {got:.3e} /sqrt(Hz); vibration under both "
        "21 cm thermal floors over 0.01-1 Hz",
        fails,
    )


def test_criterion_5_thermal_budget(network):
    t0 = time.perf_counter()
    fails = []
    rep = required_heater_power(network, (20.0, 60.0), margin=0.5)
    check(fails, rep.required_w <= 0.25, f"heater {rep.required_w:.3f} W")
    st = solve_steady_state(network, ambient_k=40.0)
    check(fails, 30.0 <= st["chamber"] <= 40.0, f"chamber {st['chamber']:.1f} K")
    areas = size_radiators([0.58, 0.013], [31.0, 14.9])
    check(fails, 10.0 <= areas[0] <= 20.0, f"radiator 1 {areas[0]:.1f} m^2")
    check(fails, 1.0 <= areas[1] <= 10.0, f"radiator 2 {areas[1]:.1f} m^2")
    elapsed = time.perf_counter() - t0
    check(fails, elapsed < 10.0, f"runtime {elapsed:.1f} s")
    record(
        5,
        f"heater {rep.required_w * 1e3:.1f} mW (margin 50%), chamber "
        f"{st['chamber']:.1f} K at 40 K ambient, radiators "
        f"{areas[0]:.1f} / {areas[1]:.1f} m^2, {elapsed:.1f} s",
        fails,
    )


def test_criterion_6_stochastic_oracles():
    t0 = time.perf_counter()
    fails = []
    h0 = 1e-30
    taus = np.array([1.0, 4.0, 16.0, 64.0, 256.0])
    res = ensemble_allan_deviation(
        PowerLawModel(h0=h0), n=2**16, dt_s=1.0, tau_s=taus, n_seeds=200, seed=101
    )
    expect = np.sqrt(h0 / (2.0 * taus))
    worst_white = float(np.max(np.abs(res.sigma_y / expect - 1.0)))
    check(fails, worst_white <= 0.05, f"white-FM off by {worst_white:.1%}")

    d = 5e-20
    trace = synthesize(PowerLawModel(drift_per_s=d), n=2**16, dt_s=2.0, seed=5)
    dtaus = np.array([2.0, 64.0, 2048.0])
    drift_dev = allan_deviation(trace, tau_s=dtaus)
    worst_drift = float(
        np.max(np.abs(drift_dev.sigma_y / (d * dtaus / math.sqrt(2.0)) - 1.0))
    )
    check(fails, worst_drift <= 0.01, f"drift sigma off by {worst_drift:.1%}")

    day_trace = synthesize(PowerLawModel(drift_per_s=d), n=1440, dt_s=60.0, seed=0)
    err = float(day_trace.x[-1])
    expect_err = 0.5 * d * DAY**2
    check(
        fails,
        abs(err / expect_err - 1.0) <= 0.01,
        f"1-day drift error {err:.4e} s",
    )
    elapsed = time.perf_counter() - t0
    check(fails, elapsed < 60.0, f"runtime {elapsed:.1f} s")
    record(
        6,
        f"white-FM within {worst_white:.2%}, drift within {worst_drift:.2%}, "
        f"1-day error {err:.4e} s, {elapsed:.1f} s",
        fails,
    )


def test_criterion_7_coherence_time(designs):
    floor, _ = thermal_floor(designs["crystalline_50cm"])
    model = PowerLawModel.from_flicker_floor(floor, drift_per_s=5e-20)
    res = coherence_time(model, carrier_hz=1.944e14, n_seeds=200, n=8192, dt_s=1.0)
    fails = []
    check(fails, not res.censored, "estimate censored at span")
    check(fails, res.tau_c_s > 60.0, f"tau_c {res.tau_c_s:.0f} s")
    record(
        7,
        f"50 cm crystalline floor {floor:.2e} -> tau_c {res.tau_c_s:.0f} s "
        f"(CI {res.ci_low_s:.0f}-{res.ci_high_s:.0f} s) > 60 s",
        fails,
    )


def test_criterion_8_timescale(designs):
    floor, _ = thermal_floor(designs["conventional_21cm"])
    model = PowerLawModel.from_flicker_floor(floor, drift_per_s=5e-20)
    rep = simulate_timescale(model, SteeringPolicy(), duration_s=10 * DAY, seed=42)
    steered = rep.sigma_y_at(DAY)
    free = synthesize(model, rep.n, rep.dt_s, seed=7)
    _, detrended = fit_remove_drift(free)
    free_dev = allan_deviation(detrended, tau_s=np.array([DAY]))
    free_sigma = float(free_dev.sigma_y[0])
    fails = []
    check(fails, steered is not None and steered < 1e-15, f"steered {steered}")
    check(fails, free_sigma < 1e-15, f"free cavity {free_sigma:.2e}")
    record(
        8,
        f"steered sigma_y(1 day) {steered:.2e}, drift-removed free cavity "
        f"{free_sigma:.2e}, both < 1e-15",
        fails,
    )


def test_criterion_9_properties(tmp_path, designs, env, network):
    fails = []

    budget = compose_budget(designs["conventional_21cm"], env)
    quad = np.sqrt(sum(c.asd_y**2 for c in budget.components))
    check(
        fails,
        bool(np.allclose(budget.total_asd_y, quad, rtol=1e-12, atol=0.0)),
        "quadrature identity",
    )

    f = np.logspace(-3.0, 0.5, 30)
    a10 = env.seismic.asd(f, "p10")
    a50 = env.seismic.asd(f, "p50")
    a90 = env.seismic.asd(f, "p90")
    check(
        fails,
        bool(np.all(a10 <= a50) and np.all(a50 <= a90)),
        "percentile ordering",
    )

    res = simulate_transient(network, duration_s=2e5, dt_s=100.0, ambient=35.0)
    stored, external = res.energy_closure()
    scale = max(abs(stored), abs(external))
    check(fails, abs(stored - external) <= 1e-3 * scale, "energy conservation")

    base = solve_steady_state(network, ambient_k=40.0)
    other = solve_steady_state(
        network, ambient_k=40.0, initial_guess={"cavity": 3.0, "chamber": 300.0}
    )
    worst = max(
        abs(other.temps_k[k] - v) for k, v in base.temps_k.items()
    )
    check(fails, worst < 1e-6, f"guess independence ({worst:.1e} K)")

    d1 = tmp_path / "r1"
    d2 = tmp_path / "r2"
    d1.mkdir()
    d2.mkdir()
    args = ("simulate", "--seed", "89", "--seconds", "3600", "--dt", "1")
    ok1 = cli_main([*args, "--out", str(d1)]) == 0
    ok2 = cli_main([*args, "--out", str(d2)]) == 0
    same = all(
        (d1 / f).read_bytes() == (d2 / f).read_bytes()
        for f in ("trace.csv", "allan.csv", "simulate.json")
    )
    check(fails, ok1 and ok2 and same, "byte-identical reruns")

    record(
        9,
        "quadrature, percentile ordering, energy closure, guess independence, "
        "byte-identical reruns",
        fails,
    )
