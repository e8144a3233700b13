"""Thermal network: steady solver, transient integrator, sizing."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lunasil import (
    HeaterServo,
    InfeasibleError,
    IntegrationError,
    TemperatureProfile,
    ThermalLink,
    ThermalNetwork,
    ThermalNode,
    ValidationError,
    default_network,
    eps_eff_parallel,
    radiative_flux,
    required_heater_power,
    simulate_transient,
    size_radiators,
    solve_steady_state,
)

SIGMA_SB = 5.670374419e-8


class TestHelpers:
    def test_parallel_gold_surfaces(self):
        # two 5% surfaces combine to 1/39
        assert eps_eff_parallel(0.05, 0.05) == pytest.approx(1.0 / 39.0, rel=1e-12)

    def test_blackbody_pair_unchanged(self):
        assert eps_eff_parallel(1.0, 1.0) == 1.0

    @settings(max_examples=50, deadline=None)
    @given(
        ta=st.floats(min_value=2.0, max_value=400.0),
        tb=st.floats(min_value=2.0, max_value=400.0),
    )
    def test_radiative_flux_antisymmetric(self, ta, tb):
        assert radiative_flux(ta, tb, 1.3, 0.4) == -radiative_flux(tb, ta, 1.3, 0.4)

    def test_radiative_flux_value(self):
        expect = SIGMA_SB * 0.9 * 15.0 * (30.0**4 - 2.7**4)
        assert radiative_flux(30.0, 2.7, 15.0, 0.9) == pytest.approx(expect, rel=1e-12)


def two_node_net(load_w=0.3, g=0.02, ambient_k=40.0):
    return ThermalNetwork(
        nodes=(
            ThermalNode("ambient", temperature_k=ambient_k, boundary=True),
            ThermalNode("plate", heat_capacity_j_per_k=100.0, temperature_k=ambient_k,
                        const_load_w=load_w),
        ),
        links=(ThermalLink("conductive", "ambient", "plate", g_w_per_k=g),),
    )


class TestSteadyState:
    def test_conductive_analytic(self):
        st_ = solve_steady_state(two_node_net())
        assert st_["plate"] == pytest.approx(40.0 + 0.3 / 0.02, rel=1e-12)
        assert st_.residual_w < 1e-9

    def test_radiative_analytic(self):
        net = ThermalNetwork(
            nodes=(
                ThermalNode("space", temperature_k=2.7, boundary=True),
                ThermalNode("panel", heat_capacity_j_per_k=100.0, temperature_k=50.0,
                            const_load_w=0.5),
            ),
            links=(ThermalLink("radiative", "panel", "space", area_m2=2.0, eps_eff=0.8),),
        )
        st_ = solve_steady_state(net)
        expect = (0.5 / (SIGMA_SB * 0.8 * 2.0) + 2.7**4) ** 0.25
        assert st_["panel"] == pytest.approx(expect, rel=1e-10)

    def test_isothermal_boundaries_uniform(self):
        net = ThermalNetwork(
            nodes=(
                ThermalNode("b1", temperature_k=30.0, boundary=True),
                ThermalNode("b2", temperature_k=30.0, boundary=True),
                ThermalNode("mid", heat_capacity_j_per_k=10.0, temperature_k=5.0),
            ),
            links=(
                ThermalLink("conductive", "b1", "mid", g_w_per_k=0.1),
                ThermalLink("radiative", "mid", "b2", area_m2=1.0, eps_eff=0.5),
            ),
        )
        st_ = solve_steady_state(net)
        assert st_["mid"] == pytest.approx(30.0, abs=1e-7)

    def test_guess_independence(self, network):
        base = solve_steady_state(network, ambient_k=40.0)
        shifted = solve_steady_state(
            network,
            ambient_k=40.0,
            initial_guess={"chamber": 200.0, "cavity": 5.0, "radiator1": 120.0},
        )
        for name, t in base.temps_k.items():
            assert shifted.temps_k[name] == pytest.approx(t, abs=1e-6)

    def test_default_network_operating_point(self, network):
        st_ = solve_steady_state(network, ambient_k=40.0)
        assert 30.0 <= st_["chamber"] <= 40.0
        assert st_["active_shield"] == pytest.approx(16.0, abs=1e-9)
        assert st_["cavity"] == pytest.approx(17.0, abs=0.25)
        assert not st_.heater_saturated
        assert 0.0 < st_.heater_power_w < 0.25

    def test_switch_state_tracks_ambient(self, network):
        cold = solve_steady_state(network, ambient_k=30.0)
        warm = solve_steady_state(network, ambient_k=45.0)
        assert not cold.switch_on
        assert warm.switch_on

    def test_servo_saturates_at_zero_when_overheated(self):
        # strong ambient coupling swamps the weak cooling path: holding the
        # setpoint would need negative power, so the heater pins at zero
        net = ThermalNetwork(
            nodes=(
                ThermalNode("ambient", temperature_k=300.0, boundary=True),
                ThermalNode("space", temperature_k=2.7, boundary=True),
                ThermalNode("shield", heat_capacity_j_per_k=10.0, temperature_k=20.0),
            ),
            links=(
                ThermalLink("conductive", "ambient", "shield", g_w_per_k=0.1),
                ThermalLink("conductive", "shield", "space", g_w_per_k=0.001),
            ),
            servo=HeaterServo(node="shield", setpoint_k=16.0),
        )
        st_ = solve_steady_state(net)
        assert st_.heater_saturated
        assert st_.heater_power_w == 0.0
        assert st_["shield"] > 16.0


class TestHeaterSizing:
    def test_within_budget_over_season(self, network):
        rep = required_heater_power(network, (20.0, 60.0), margin=0.5)
        assert rep.required_w <= 0.25
        assert np.all(rep.power_w >= 0.0)
        assert rep.required_w == pytest.approx(np.max(rep.power_w) * 1.5, rel=1e-12)

    def test_grid_includes_switch_threshold(self, network):
        rep = required_heater_power(network, (20.0, 60.0), n_grid=5)
        assert np.any(np.isclose(rep.ambient_k, 40.0))

    def test_infeasible_raises(self):
        net = ThermalNetwork(
            nodes=(
                ThermalNode("ambient", temperature_k=100.0, boundary=True),
                ThermalNode("shield", heat_capacity_j_per_k=10.0, temperature_k=20.0),
            ),
            links=(ThermalLink("conductive", "ambient", "shield", g_w_per_k=0.1),),
            servo=HeaterServo(node="shield", setpoint_k=16.0),
        )
        with pytest.raises(InfeasibleError, match="negative heater power"):
            required_heater_power(net, (90.0, 110.0))

    def test_needs_servo(self):
        with pytest.raises(ValidationError):
            required_heater_power(two_node_net())


class TestRadiatorSizing:
    def test_formula(self):
        areas = size_radiators([0.58, 0.013], [31.0, 14.9], emissivity=0.9, margin=0.5)
        a1 = 0.58 * 1.5 / (SIGMA_SB * 0.9 * (31.0**4 - 2.7**4))
        a2 = 0.013 * 1.5 / (SIGMA_SB * 0.9 * (14.9**4 - 2.7**4))
        assert areas[0] == pytest.approx(a1, rel=1e-12)
        assert areas[1] == pytest.approx(a2, rel=1e-12)

    def test_default_stages_land_in_ranges(self):
        areas = size_radiators([0.58, 0.013], [31.0, 14.9])
        assert 10.0 <= areas[0] <= 20.0
        assert 1.0 <= areas[1] <= 10.0

    def test_margin_scales_linearly(self):
        a0 = size_radiators([1.0], [30.0], margin=0.0)[0]
        a1 = size_radiators([1.0], [30.0], margin=1.0)[0]
        assert a1 == pytest.approx(2.0 * a0, rel=1e-12)

    def test_target_below_sink_rejected(self):
        with pytest.raises(ValidationError):
            size_radiators([1.0], [2.0])


class TestTransient:
    def test_steady_start_stays(self, network):
        st_ = solve_steady_state(network, ambient_k=40.0)
        res = simulate_transient(
            network, duration_s=10000.0, dt_s=10.0, ambient=40.0,
            initial_temps=st_.temps_k,
        )
        assert np.max(np.abs(res.temps_k - res.temps_k[0])) < 1e-6

    def test_relaxes_to_analytic_value(self):
        net = two_node_net(load_w=0.0, g=0.02, ambient_k=40.0)
        res = simulate_transient(
            net, duration_s=50000.0, dt_s=50.0, ambient=40.0,
            initial_temps={"plate": 10.0},
        )
        # single tau = C/G = 5000 s; exact exponential relaxation
        t_end = res.times_s[-1]
        expect = 40.0 + (10.0 - 40.0) * math.exp(-t_end / 5000.0)
        assert res.temperature("plate")[-1] == pytest.approx(expect, rel=1e-8)

    def test_energy_closure(self, network):
        res = simulate_transient(network, duration_s=2.0e5, dt_s=100.0, ambient=35.0)
        stored, external = res.energy_closure()
        scale = max(abs(stored), abs(external))
        assert abs(stored - external) <= 1e-3 * scale

    def test_cold_start_reaches_steady(self, network):
        st_ = solve_steady_state(network, ambient_k=40.0)
        res = simulate_transient(network, duration_s=3.0e6, dt_s=200.0, ambient=40.0)
        for name in ("chamber", "active_shield", "radiator1"):
            assert res.temperature(name)[-1] == pytest.approx(
                st_.temps_k[name], abs=0.01
            )

    def test_seasonal_drive_crosses_switch(self, network):
        prof = TemperatureProfile(20.0, 60.0, slew_k_per_day=0.5)
        st_ = solve_steady_state(network, ambient_k=20.0)
        res = simulate_transient(
            network,
            duration_s=86400.0 * 120,
            dt_s=600.0,
            ambient=prof,
            initial_temps=st_.temps_k,
        )
        amb = res.temperature("ambient")
        assert amb.min() < 39.0 < amb.max()
        # cavity stays pinned near the zero crossing throughout
        cav = res.temperature("cavity")
        assert np.max(np.abs(cav - cav[0])) < 0.05

    def test_instability_reported_with_suggestion(self, network):
        with pytest.raises(IntegrationError, match="dt"):
            simulate_transient(network, duration_s=1e6, dt_s=50000.0, ambient=40.0)

    def test_record_cadence(self, network):
        res = simulate_transient(
            network, duration_s=1000.0, dt_s=10.0, ambient=40.0, record_every=10
        )
        assert res.times_s[0] == 0.0
        assert res.times_s[-1] == 1000.0
        assert np.allclose(np.diff(res.times_s), 100.0)


class TestValidation:
    def test_duplicate_node_names(self):
        with pytest.raises(ValidationError):
            ThermalNetwork(
                nodes=(
                    ThermalNode("a", temperature_k=10.0, boundary=True),
                    ThermalNode("a", temperature_k=10.0),
                ),
                links=(),
                ambient_node="a",
            )

    def test_disconnected_node_rejected(self):
        with pytest.raises(ValidationError, match="no heat path"):
            ThermalNetwork(
                nodes=(
                    ThermalNode("ambient", temperature_k=10.0, boundary=True),
                    ThermalNode("orphan", temperature_k=10.0),
                ),
                links=(),
            )

    def test_link_to_unknown_node(self):
        with pytest.raises(ValidationError):
            ThermalNetwork(
                nodes=(ThermalNode("ambient", temperature_k=10.0, boundary=True),),
                links=(ThermalLink("conductive", "ambient", "ghost", g_w_per_k=1.0),),
            )

    def test_needs_boundary(self):
        with pytest.raises(ValidationError):
            ThermalNetwork(
                nodes=(ThermalNode("a", temperature_k=10.0),),
                links=(),
                ambient_node="a",
            )

    def test_default_network_valid(self):
        net = default_network()
        assert net.servo is not None
        assert net.switch_threshold_k == 40.0
