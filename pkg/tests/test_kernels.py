"""Backend selection plus loop-level oracles for the numeric kernels."""

import math
import os
import subprocess
import sys

import numpy as np
import pytest

from lunasil import _kernels
from lunasil._kernels import _pure
from lunasil import (
    HeaterServo,
    ThermalLink,
    ThermalNetwork,
    ThermalNode,
    simulate_transient,
)

try:
    from lunasil._kernels import _core
except ImportError:
    _core = None

needs_compiled = pytest.mark.skipif(_core is None, reason="compiled kernels absent")


def naive_adev(x, ms):
    sums, counts = [], []
    for m in ms:
        s = 0.0
        c = 0
        for i in range(len(x) - 2 * m):
            d = x[i + 2 * m] - 2.0 * x[i + m] + x[i]
            s += d * d
            c += 1
        sums.append(s)
        counts.append(c)
    return np.array(sums), np.array(counts)


def naive_madev(x, ms):
    sums, counts = [], []
    for m in ms:
        s = 0.0
        c = 0
        for j in range(len(x) - 3 * m + 1):
            acc = 0.0
            for i in range(j, j + m):
                acc += x[i + 2 * m] - 2.0 * x[i + m] + x[i]
            s += acc * acc
            c += 1
        sums.append(s)
        counts.append(c)
    return np.array(sums), np.array(counts)


def naive_lag(x, ms):
    sums, counts = [], []
    for m in ms:
        s = 0.0
        for i in range(len(x) - m):
            d = x[i + m] - x[i]
            s += d * d
        sums.append(s)
        counts.append(len(x) - m)
    return np.array(sums), np.array(counts)


@pytest.fixture(scope="module")
def phase():
    rng = np.random.default_rng(2024)
    return np.cumsum(rng.standard_normal(200)) * 1e-15


MS = [1, 2, 3, 7, 25, 66]


class TestLoopOracles:
    def test_adev_sums(self, phase):
        got_s, got_c = _pure.adev_sums(phase, np.array(MS))
        exp_s, exp_c = naive_adev(phase, MS)
        assert np.array_equal(got_c, exp_c)
        assert np.allclose(got_s, exp_s, rtol=1e-12, atol=0.0)

    def test_madev_sums(self, phase):
        got_s, got_c = _pure.madev_sums(phase, np.array(MS))
        exp_s, exp_c = naive_madev(phase, MS)
        assert np.array_equal(got_c, exp_c)
        assert np.allclose(got_s, exp_s, rtol=1e-10, atol=0.0)

    def test_lag_sq_sums(self, phase):
        got_s, got_c = _pure.lag_sq_sums(phase, np.array(MS))
        exp_s, exp_c = naive_lag(phase, MS)
        assert np.array_equal(got_c, exp_c)
        assert np.allclose(got_s, exp_s, rtol=1e-12, atol=0.0)

    def test_madev_equals_adev_at_m1(self, phase):
        ms = np.array([1])
        a_s, a_c = _pure.adev_sums(phase, ms)
        m_s, m_c = _pure.madev_sums(phase, ms)
        assert a_s[0] == pytest.approx(m_s[0], rel=1e-12)


@needs_compiled
class TestBackendEquivalence:
    def test_allan_kernels_match(self, phase):
        ms = np.array(MS)
        for fn in ("adev_sums", "madev_sums", "lag_sq_sums"):
            cs, cc = getattr(_core, fn)(phase, ms)
            ps, pc = getattr(_pure, fn)(phase, ms)
            assert np.array_equal(cc, pc)
            assert np.allclose(cs, ps, rtol=1e-12, atol=0.0)

    def test_thermal_trajectories_identical(self):
        net = small_net()
        res = simulate_transient(net, duration_s=5000.0, dt_s=5.0, ambient=35.0)
        env = dict(os.environ, LUNASIL_PURE="1")
        code = (
            "import numpy as np\n"
            "from tests.test_kernels import small_net\n"
            "from lunasil import simulate_transient\n"
            "r = simulate_transient(small_net(), duration_s=5000.0, dt_s=5.0, ambient=35.0)\n"
            "np.save('pure_temps.npy', r.temps_k)\n"
            "np.save('pure_heater.npy', r.heater_w)\n"
        )
        subprocess.run(
            [sys.executable, "-c", code],
            env=env,
            check=True,
            cwd=os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
        )
        root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
        pure_temps = np.load(os.path.join(root, "pure_temps.npy"))
        pure_heater = np.load(os.path.join(root, "pure_heater.npy"))
        os.remove(os.path.join(root, "pure_temps.npy"))
        os.remove(os.path.join(root, "pure_heater.npy"))
        assert np.array_equal(res.temps_k, pure_temps)
        assert np.array_equal(res.heater_w, pure_heater)


class TestBackendSelection:
    def test_env_override_forces_python(self):
        out = subprocess.run(
            [sys.executable, "-c", "from lunasil import BACKEND; print(BACKEND)"],
            env=dict(os.environ, LUNASIL_PURE="1"),
            capture_output=True,
            text=True,
            check=True,
        )
        assert out.stdout.strip() == "python"

    def test_backend_reported(self):
        assert _kernels.BACKEND in ("compiled", "python")


def small_net():
    # the core needs a passive equilibrium below the 16 K setpoint or a
    # heat-only servo has nothing to regulate against
    return ThermalNetwork(
        nodes=(
            ThermalNode("ambient", temperature_k=35.0, boundary=True),
            ThermalNode("space", temperature_k=2.7, boundary=True),
            ThermalNode("stage", heat_capacity_j_per_k=40.0, temperature_k=25.0,
                        const_load_w=0.002),
            ThermalNode("core", heat_capacity_j_per_k=8.0, temperature_k=16.0),
        ),
        links=(
            ThermalLink("conductive", "ambient", "stage", g_w_per_k=5e-4),
            ThermalLink("radiative", "stage", "space", area_m2=0.8, eps_eff=0.6),
            ThermalLink("conductive", "stage", "core", g_w_per_k=1e-4),
            ThermalLink("radiative", "core", "space", area_m2=0.8, eps_eff=0.5),
            ThermalLink("switchable", "ambient", "core", g_w_per_k=0.01,
                        g_off_w_per_k=1e-5),
        ),
        servo=HeaterServo(node="core", setpoint_k=16.0, kp_w_per_k=0.05,
                          ki_w_per_k_s=1e-4, p_max_w=0.5),
    )


class TestIntegratorOracles:
    def test_exponential_decay_exact(self):
        # dT/dt = -(G/C)(T - Tb): RK4 local error ~ (dt/tau)^5 / 120
        net = ThermalNetwork(
            nodes=(
                ThermalNode("ambient", temperature_k=30.0, boundary=True),
                ThermalNode("blob", heat_capacity_j_per_k=200.0, temperature_k=80.0),
            ),
            links=(ThermalLink("conductive", "ambient", "blob", g_w_per_k=0.1),),
        )
        tau = 200.0 / 0.1
        res = simulate_transient(net, duration_s=6000.0, dt_s=2.0, record_every=1)
        expect = 30.0 + 50.0 * np.exp(-res.times_s / tau)
        assert np.max(np.abs(res.temperature("blob") - expect)) < 1e-9

    def test_proportional_droop_equilibrium(self):
        # pure P servo leaves the textbook droop offset
        g, kp, sp, tb = 0.02, 0.08, 18.0, 10.0
        net = ThermalNetwork(
            nodes=(
                ThermalNode("ambient", temperature_k=tb, boundary=True),
                ThermalNode("plate", heat_capacity_j_per_k=30.0, temperature_k=12.0),
            ),
            links=(ThermalLink("conductive", "ambient", "plate", g_w_per_k=g),),
            servo=HeaterServo(node="plate", setpoint_k=sp, kp_w_per_k=kp,
                              ki_w_per_k_s=0.0, p_max_w=5.0),
        )
        res = simulate_transient(
            net, duration_s=4e4, dt_s=5.0, servo_integral0=0.0
        )
        expect = (kp * sp + g * tb) / (kp + g)
        assert res.temperature("plate")[-1] == pytest.approx(expect, rel=1e-9)

    def test_integral_action_removes_droop(self):
        net = small_net()
        res = simulate_transient(net, duration_s=2e5, dt_s=20.0, ambient=35.0)
        assert res.temperature("core")[-1] == pytest.approx(16.0, abs=1e-4)

    def test_energy_closure_machine_level(self):
        net = small_net()
        res = simulate_transient(net, duration_s=2e4, dt_s=5.0, ambient=35.0)
        stored, external = res.energy_closure()
        scale = max(abs(stored), abs(external), 1.0)
        assert abs(stored - external) <= 1e-10 * scale
