"""Radiative-cooling thermal network of the cavity cryostat.

Topology (default network): two deep-space radiator panels; the cavity
chamber (outer shield) coupled to the first radiator through a thermal
switch; an actively stabilised shield (PI-controlled heater against the
second radiator's cooling); a floating passive shield; and the cavity
itself, all nested with low-emissivity gold surfaces.  Boundary nodes are
the ambient surroundings and the 2.7 K sky.

Heat flows: conductive ``G (T_a - T_b)``, radiative
``sigma eps_eff A (T_a^4 - T_b^4)``, plus constant parasitic loads.  The
steady solver is a damped Newton iteration with analytic Jacobian; the
transient integrator is fixed-step RK4 (compiled kernel when available).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .constants import SIGMA_SB, T_DEEP_SPACE_K
from .errors import InfeasibleError, IntegrationError, SolverError, ValidationError

CONDUCTIVE = "conductive"
RADIATIVE = "radiative"
SWITCHABLE = "switchable"


def eps_eff_parallel(e1: float, e2: float) -> float:
    """Effective emissivity of close parallel grey surfaces:
    ``1 / (1/e1 + 1/e2 - 1)``."""
    if not (0.0 < e1 <= 1.0 and 0.0 < e2 <= 1.0):
        raise ValidationError("emissivities must lie in (0, 1]")
    return 1.0 / (1.0 / e1 + 1.0 / e2 - 1.0)


def radiative_flux(t_hot_k: float, t_cold_k: float, area_m2: float, eps_eff: float) -> float:
    """Net radiative heat flow hot -> cold, in W (antisymmetric in its
    temperature arguments)."""
    if area_m2 < 0.0 or eps_eff < 0.0:
        raise ValidationError("area and emissivity must be >= 0")
    return SIGMA_SB * eps_eff * area_m2 * (t_hot_k**4 - t_cold_k**4)


@dataclass(frozen=True)
class ThermalNode:
    """One lumped-capacity node (or a fixed-temperature boundary)."""

    name: str
    heat_capacity_j_per_k: float = 1.0
    temperature_k: float = 20.0
    boundary: bool = False
    const_load_w: float = 0.0

    def __post_init__(self):
        if not self.boundary and self.heat_capacity_j_per_k <= 0.0:
            raise ValidationError(f"node {self.name}: heat capacity must be > 0")
        if self.temperature_k <= 0.0:
            raise ValidationError(f"node {self.name}: temperature must be > 0")


@dataclass(frozen=True)
class ThermalLink:
    """Heat path between two nodes."""

    kind: str
    node_a: str
    node_b: str
    g_w_per_k: float = 0.0
    g_off_w_per_k: float = 0.0
    area_m2: float = 0.0
    eps_eff: float = 0.0

    def __post_init__(self):
        if self.kind not in (CONDUCTIVE, RADIATIVE, SWITCHABLE):
            raise ValidationError(f"unknown link kind {self.kind!r}")
        if self.node_a == self.node_b:
            raise ValidationError("link endpoints must differ")
        if self.kind == RADIATIVE:
            if self.area_m2 <= 0.0 or not (0.0 < self.eps_eff <= 1.0):
                raise ValidationError("radiative link needs area > 0 and eps_eff in (0, 1]")
        else:
            if self.g_w_per_k < 0.0 or self.g_off_w_per_k < 0.0:
                raise ValidationError("conductances must be >= 0")


@dataclass(frozen=True)
class HeaterServo:
    """PI heater control holding one node at a setpoint."""

    node: str
    setpoint_k: float = 16.0
    kp_w_per_k: float = 0.02
    ki_w_per_k_s: float = 5e-6
    p_max_w: float = 1.0

    def __post_init__(self):
        if self.setpoint_k <= 0.0:
            raise ValidationError("setpoint must be > 0")
        if self.kp_w_per_k < 0.0 or self.ki_w_per_k_s < 0.0 or self.p_max_w <= 0.0:
            raise ValidationError("servo gains must be >= 0 and p_max > 0")


@dataclass(frozen=True)
class ThermalNetwork:
    """Nodes, links, optional heater servo, and the thermal-switch rule."""

    nodes: tuple
    links: tuple
    servo: HeaterServo | None = None
    ambient_node: str = "ambient"
    switch_threshold_k: float = 40.0

    def __post_init__(self):
        names = [n.name for n in self.nodes]
        if len(set(names)) != len(names):
            raise ValidationError("duplicate node names")
        if self.ambient_node not in names and any(
            l.kind == SWITCHABLE for l in self.links
        ):
            raise ValidationError(
                f"switchable links need the ambient node {self.ambient_node!r}"
            )
        byname = {n.name: n for n in self.nodes}
        for link in self.links:
            for end in (link.node_a, link.node_b):
                if end not in byname:
                    raise ValidationError(f"link references unknown node {end!r}")
        if self.servo is not None:
            if self.servo.node not in byname:
                raise ValidationError(f"servo node {self.servo.node!r} not defined")
            if byname[self.servo.node].boundary:
                raise ValidationError("servo cannot act on a boundary node")
        if not any(n.boundary for n in self.nodes):
            raise ValidationError("network needs at least one boundary node")
        self._check_connected(byname)

    def _check_connected(self, byname):
        adj = {n.name: set() for n in self.nodes}
        for link in self.links:
            adj[link.node_a].add(link.node_b)
            adj[link.node_b].add(link.node_a)
        seen = {n.name for n in self.nodes if n.boundary}
        stack = list(seen)
        while stack:
            for nb in adj[stack.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        missing = [n.name for n in self.nodes if n.name not in seen]
        if missing:
            raise ValidationError(
                f"node(s) {missing} have no heat path to any boundary"
            )

    def node(self, name: str) -> ThermalNode:
        for n in self.nodes:
            if n.name == name:
                return n
        raise KeyError(name)

    def with_ambient(self, ambient_k: float) -> "ThermalNetwork":
        if self.ambient_node not in {n.name for n in self.nodes}:
            raise ValidationError(
                f"cannot override ambient: no node named {self.ambient_node!r}"
            )
        nodes = tuple(
            replace(n, temperature_k=ambient_k) if n.name == self.ambient_node else n
            for n in self.nodes
        )
        return replace(self, nodes=nodes)


@dataclass(frozen=True)
class _Compiled:
    names: tuple
    index: dict
    temps0: np.ndarray
    inv_c: np.ndarray
    heat_caps: np.ndarray
    const_load: np.ndarray
    boundary: np.ndarray  # bool mask
    boundary_idx: np.ndarray
    link_kind: np.ndarray
    link_a: np.ndarray
    link_b: np.ndarray
    link_c1: np.ndarray
    link_c2: np.ndarray
    ambient_pos: int
    heater_idx: int


def _compile(network: ThermalNetwork) -> _Compiled:
    names = tuple(n.name for n in network.nodes)
    index = {name: i for i, name in enumerate(names)}
    n = len(names)
    temps0 = np.array([nd.temperature_k for nd in network.nodes], dtype=float)
    caps = np.array(
        [nd.heat_capacity_j_per_k if not nd.boundary else np.inf for nd in network.nodes],
        dtype=float,
    )
    inv_c = np.where(np.isinf(caps), 0.0, 1.0 / caps)
    const_load = np.array([nd.const_load_w for nd in network.nodes], dtype=float)
    boundary = np.array([nd.boundary for nd in network.nodes], dtype=bool)
    boundary_idx = np.nonzero(boundary)[0].astype(np.int32)
    kind_code = {CONDUCTIVE: 0, RADIATIVE: 1, SWITCHABLE: 2}
    lk, la, lb, c1, c2 = [], [], [], [], []
    for link in network.links:
        lk.append(kind_code[link.kind])
        la.append(index[link.node_a])
        lb.append(index[link.node_b])
        if link.kind == RADIATIVE:
            c1.append(SIGMA_SB * link.eps_eff * link.area_m2)
            c2.append(0.0)
        else:
            c1.append(link.g_w_per_k)
            c2.append(link.g_off_w_per_k if link.kind == SWITCHABLE else 0.0)
    amb_i = index.get(network.ambient_node, -1)
    ambient_pos = (
        int(np.nonzero(boundary_idx == amb_i)[0][0])
        if amb_i >= 0 and boundary[amb_i]
        else -1
    )
    heater_idx = index[network.servo.node] if network.servo is not None else -1
    return _Compiled(
        names=names,
        index=index,
        temps0=temps0,
        inv_c=inv_c,
        heat_caps=caps,
        const_load=const_load,
        boundary=boundary,
        boundary_idx=boundary_idx,
        link_kind=np.array(lk, dtype=np.int32),
        link_a=np.array(la, dtype=np.int32),
        link_b=np.array(lb, dtype=np.int32),
        link_c1=np.array(c1, dtype=float),
        link_c2=np.array(c2, dtype=float),
        ambient_pos=ambient_pos,
        heater_idx=heater_idx,
    )


def _net_inflow(comp: _Compiled, temps: np.ndarray, switch_on: bool, heater: dict | None = None):
    """Per-node net heat inflow in W and its Jacobian d(inflow)/dT."""
    n = temps.shape[0]
    flow = comp.const_load.copy()
    jac = np.zeros((n, n))
    for li in range(comp.link_kind.shape[0]):
        a = int(comp.link_a[li])
        b = int(comp.link_b[li])
        kind = int(comp.link_kind[li])
        if kind == 1:
            c = comp.link_c1[li]
            q = c * (temps[a] ** 4 - temps[b] ** 4)
            dq_da = 4.0 * c * temps[a] ** 3
            dq_db = -4.0 * c * temps[b] ** 3
        else:
            g = comp.link_c1[li] if (kind == 0 or switch_on) else comp.link_c2[li]
            q = g * (temps[a] - temps[b])
            dq_da = g
            dq_db = -g
        flow[a] -= q
        flow[b] += q
        jac[a, a] -= dq_da
        jac[a, b] -= dq_db
        jac[b, a] += dq_da
        jac[b, b] += dq_db
    if heater:
        for i, p in heater.items():
            flow[i] += p
    return flow, jac


@dataclass(frozen=True)
class SteadyState:
    """Converged operating point of the network."""

    temps_k: dict
    heater_power_w: float
    heater_saturated: bool
    residual_w: float
    iterations: int
    switch_on: bool

    def __getitem__(self, name: str) -> float:
        return self.temps_k[name]


def _newton(comp, temps, free_idx, switch_on, heater, max_iter=200, tol=1e-9):
    """Damped Newton on the free-node energy balance; returns (temps, res, it).

    Converges on the power residual and on the Newton step length in kelvin,
    so weakly coupled nodes (tiny conductances) still land on a well-defined
    temperature regardless of the starting guess.
    """
    temps = temps.copy()
    free = np.asarray(free_idx, dtype=int)
    flow, jac = _net_inflow(comp, temps, switch_on, heater)
    res = float(np.max(np.abs(flow[free]))) if free.size else 0.0
    for it in range(1, max_iter + 1):
        if not free.size:
            return temps, res, it - 1
        sub_j = jac[np.ix_(free, free)]
        try:
            step = np.linalg.solve(sub_j, -flow[free])
        except np.linalg.LinAlgError:
            raise SolverError("singular Jacobian in steady-state solve") from None
        if res < tol and float(np.max(np.abs(step))) < 1e-9:
            return temps, res, it - 1
        alpha = 1.0
        for _ in range(50):
            trial = temps.copy()
            trial[free] = np.clip(temps[free] + alpha * step, 1.35, 1500.0)
            t_flow, t_jac = _net_inflow(comp, trial, switch_on, heater)
            t_res = float(np.max(np.abs(t_flow[free])))
            if t_res < res or t_res < tol:
                temps, flow, jac, res = trial, t_flow, t_jac, t_res
                break
            alpha *= 0.5
        else:
            raise SolverError(
                f"steady-state solve stalled at residual {res:.3e} W "
                f"(worst node {comp.names[int(free[np.argmax(np.abs(flow[free]))])]})"
            )
    raise SolverError(f"steady-state solve did not converge: residual {res:.3e} W")


def default_initial_guess(network: ThermalNetwork) -> dict:
    """Deterministic start point: free nodes linearly interpolated between
    the hottest and coldest boundary temperatures, in declaration order."""
    b_temps = [n.temperature_k for n in network.nodes if n.boundary]
    hi, lo = max(b_temps), min(b_temps)
    free = [n.name for n in network.nodes if not n.boundary]
    n = len(free)
    return {
        name: hi + (i + 1) * (lo - hi) / (n + 1) for i, name in enumerate(free)
    }


def solve_steady_state(
    network: ThermalNetwork,
    ambient_k: float | None = None,
    initial_guess: dict | None = None,
) -> SteadyState:
    """Solve the network energy balance to a residual below 1e-9 W per node.

    When the network has a heater servo the servo node is first clamped at
    its setpoint and the implied heater power computed; if that power falls
    outside ``[0, p_max]`` the solve is repeated with the heater pinned at
    the violated bound and the node left floating (``heater_saturated``).

    Args:
        network: Network description.
        ambient_k: Optional override of the ambient boundary temperature.
        initial_guess: Optional mapping of free-node starting temperatures
            (defaults to the deterministic linear interpolation).

    Returns:
        The :class:`SteadyState`.

    Raises:
        SolverError: If the damped Newton iteration fails to converge.
    """
    net = network if ambient_k is None else network.with_ambient(ambient_k)
    comp = _compile(net)
    temps = comp.temps0.copy()
    guess = default_initial_guess(net)
    if initial_guess:
        guess.update(initial_guess)
    for name, t in guess.items():
        i = comp.index[name]
        if not comp.boundary[i]:
            temps[i] = t
    if net.ambient_node in comp.index:
        amb_t = temps[comp.index[net.ambient_node]]
        switch_on = bool(amb_t >= net.switch_threshold_k)
    else:
        switch_on = False

    free = [i for i in range(len(comp.names)) if not comp.boundary[i]]
    if net.servo is None:
        temps, res, it = _newton(comp, temps, free, switch_on, None)
        return SteadyState(
            temps_k={nm: float(temps[i]) for i, nm in enumerate(comp.names)},
            heater_power_w=0.0,
            heater_saturated=False,
            residual_w=res,
            iterations=it,
            switch_on=switch_on,
        )

    h = comp.heater_idx
    clamped = [i for i in free if i != h]
    temps[h] = net.servo.setpoint_k
    temps, res, it = _newton(comp, temps, clamped, switch_on, None)
    flow, _ = _net_inflow(comp, temps, switch_on)
    p_req = -float(flow[h])
    if -1e-9 <= p_req <= net.servo.p_max_w:
        return SteadyState(
            temps_k={nm: float(temps[i]) for i, nm in enumerate(comp.names)},
            heater_power_w=max(0.0, p_req),
            heater_saturated=False,
            residual_w=res,
            iterations=it,
            switch_on=switch_on,
        )
    p_fix = 0.0 if p_req < 0.0 else net.servo.p_max_w
    temps2 = comp.temps0.copy()
    for name, t in guess.items():
        i = comp.index[name]
        if not comp.boundary[i]:
            temps2[i] = t
    temps2, res2, it2 = _newton(comp, temps2, free, switch_on, {h: p_fix})
    return SteadyState(
        temps_k={nm: float(temps2[i]) for i, nm in enumerate(comp.names)},
        heater_power_w=p_fix,
        heater_saturated=True,
        residual_w=res2,
        iterations=it + it2,
        switch_on=switch_on,
    )


@dataclass(frozen=True)
class HeaterReport:
    """Heater demand across the ambient range."""

    ambient_k: np.ndarray
    power_w: np.ndarray
    margin: float
    required_w: float  # max demand including the load margin


def required_heater_power(
    network: ThermalNetwork,
    ambient_range: tuple = (20.0, 60.0),
    n_grid: int = 9,
    margin: float = 0.5,
) -> HeaterReport:
    """Maximum heater power needed to hold the servo setpoint, with margin.

    Sweeps the ambient boundary over ``ambient_range``; at each point the
    servo node is clamped at its setpoint and the implied power computed.
    The report's ``required_w`` is the worst-case demand multiplied by
    ``1 + margin``.

    Raises:
        InfeasibleError: If any ambient point needs negative power (the
            shield would float above the setpoint with the heater off).
        ValidationError: If the network has no servo.
    """
    if network.servo is None:
        raise ValidationError("network has no heater servo")
    lo, hi = ambient_range
    if not (0.0 < lo <= hi):
        raise ValidationError("need 0 < ambient lo <= hi")
    grid = np.linspace(lo, hi, int(n_grid))
    # Evaluate both sides of the switch threshold if it falls in range.
    thr = network.switch_threshold_k
    if lo < thr <= hi:
        grid = np.unique(np.concatenate([grid, [thr - 1e-6, thr]]))
    powers = np.empty(grid.shape[0])
    for i, amb in enumerate(grid):
        comp = _compile(network.with_ambient(float(amb)))
        temps = comp.temps0.copy()
        for name, t in default_initial_guess(network).items():
            j = comp.index[name]
            temps[j] = t
        switch_on = bool(amb >= thr)
        h = comp.heater_idx
        clamped = [j for j in range(len(comp.names)) if not comp.boundary[j] and j != h]
        temps[h] = network.servo.setpoint_k
        temps, _, _ = _newton(comp, temps, clamped, switch_on, None)
        flow, _ = _net_inflow(comp, temps, switch_on)
        p = -float(flow[h])
        if p < -1e-9:
            raise InfeasibleError(
                f"holding the {network.servo.node!r} setpoint at ambient "
                f"{amb:.3f} K would need negative heater power ({p:.3e} W); "
                "increase the cooling path or raise the setpoint"
            )
        powers[i] = max(0.0, p)
    return HeaterReport(
        ambient_k=grid,
        power_w=powers,
        margin=margin,
        required_w=float(np.max(powers)) * (1.0 + margin),
    )


def size_radiators(
    loads_w,
    t_targets_k,
    emissivity: float = 0.9,
    margin: float = 0.5,
    t_sink_k: float = T_DEEP_SPACE_K,
) -> np.ndarray:
    """Radiator areas that reject the given loads at the target temperatures.

    ``A = load (1 + margin) / (sigma eps (T^4 - T_sink^4))`` per stage.

    Returns:
        Areas in m^2, same length as ``loads_w``.
    """
    loads = np.atleast_1d(np.asarray(loads_w, dtype=float))
    targets = np.atleast_1d(np.asarray(t_targets_k, dtype=float))
    if loads.shape != targets.shape:
        raise ValidationError("loads and targets must have matching shapes")
    if np.any(loads < 0.0):
        raise ValidationError("loads must be >= 0")
    if not (0.0 < emissivity <= 1.0):
        raise ValidationError("emissivity must lie in (0, 1]")
    if np.any(targets <= t_sink_k):
        raise ValidationError("radiator targets must exceed the sink temperature")
    if margin < 0.0:
        raise ValidationError("margin must be >= 0")
    return loads * (1.0 + margin) / (SIGMA_SB * emissivity * (targets**4 - t_sink_k**4))


@dataclass(frozen=True)
class TransientResult:
    """Recorded trajectory of a transient run."""

    node_names: tuple
    times_s: np.ndarray
    temps_k: np.ndarray  # (n_records, n_nodes)
    heater_w: np.ndarray
    e_ext_j: np.ndarray  # cumulative boundary-link + constant-load energy
    e_heater_j: np.ndarray
    heat_caps_j_per_k: np.ndarray
    boundary: np.ndarray
    dt_s: float

    def temperature(self, name: str) -> np.ndarray:
        return self.temps_k[:, self.node_names.index(name)]

    def energy_closure(self, i0: int = 0, i1: int = -1):
        """Stored-energy change vs net external energy over a record window.

        Returns ``(stored_j, external_j)``; the two agree to integrator
        rounding because both sides are advanced by the same RK4 stages.
        """
        free = ~self.boundary
        caps = self.heat_caps_j_per_k[free]
        stored = float(np.dot(caps, self.temps_k[i1, free] - self.temps_k[i0, free]))
        external = float(
            self.e_ext_j[i1] - self.e_ext_j[i0] + self.e_heater_j[i1] - self.e_heater_j[i0]
        )
        return stored, external


def _stability_suggestion(comp: _Compiled, temps: np.ndarray, kp: float) -> float:
    g_eff = np.zeros(temps.shape[0])
    for li in range(comp.link_kind.shape[0]):
        a = int(comp.link_a[li])
        b = int(comp.link_b[li])
        if int(comp.link_kind[li]) == 1:
            t_ref = max(temps[a], temps[b])
            g = 4.0 * comp.link_c1[li] * t_ref**3
        else:
            g = comp.link_c1[li]
        g_eff[a] += g
        g_eff[b] += g
    if comp.heater_idx >= 0:
        g_eff[comp.heater_idx] += kp
    free = ~comp.boundary
    tau = comp.heat_caps[free] / np.maximum(g_eff[free], 1e-300)
    return 2.5 * float(np.min(tau))


def simulate_transient(
    network: ThermalNetwork,
    duration_s: float,
    dt_s: float = 10.0,
    ambient=None,
    initial_temps: dict | None = None,
    record_every: int | None = None,
    servo_integral0: float | None = None,
) -> TransientResult:
    """Integrate the network forward with fixed-step RK4.

    Args:
        network: Network description.
        duration_s: Span to integrate.
        dt_s: Step size (default 10 s).
        ambient: Ambient drive: a constant in K, a callable of time in
            seconds, an object with ``at_seconds``, or None for the
            configured ambient node temperature.
        initial_temps: Optional per-node starting temperatures.
        record_every: Record cadence in steps (default keeps roughly 2000
            records).
        servo_integral0: Initial servo integral term in W.  Default: the
            steady heater power at the initial ambient when computable, so
            a run started from a steady state stays there.

    Returns:
        The :class:`TransientResult`.

    Raises:
        IntegrationError: When the state diverges; the message suggests a
            stable step size.
    """
    if duration_s <= 0.0 or dt_s <= 0.0:
        raise ValidationError("duration_s and dt_s must be > 0")
    n_steps = int(round(duration_s / dt_s))
    if n_steps < 1:
        raise ValidationError("duration shorter than one step")
    comp = _compile(network)
    temps0 = comp.temps0.copy()
    if initial_temps:
        for name, t in initial_temps.items():
            temps0[comp.index[name]] = float(t)

    # Ambient drive table (piecewise linear in the kernel).
    amb_fn = None
    amb_const = 0.0
    if ambient is not None and comp.ambient_pos < 0:
        raise ValidationError(
            f"ambient drive given but {network.ambient_node!r} is not a "
            "boundary node of this network"
        )
    if ambient is None:
        if comp.ambient_pos >= 0:
            amb_const = float(temps0[comp.index[network.ambient_node]])
    elif isinstance(ambient, (int, float)):
        amb_const = float(ambient)
    elif hasattr(ambient, "at_seconds"):
        amb_fn = ambient.at_seconds
    elif callable(ambient):
        amb_fn = ambient
    else:
        raise ValidationError("ambient must be a number, callable, or profile")
    if amb_fn is None:
        table_t = np.array([0.0, duration_s])
    else:
        table_t = np.linspace(0.0, duration_s, 2001)
    n_bnd = comp.boundary_idx.shape[0]
    table_vals = np.empty((table_t.shape[0], n_bnd))
    for pos, idx in enumerate(comp.boundary_idx):
        if pos == comp.ambient_pos:
            if amb_fn is None:
                table_vals[:, pos] = amb_const
            else:
                table_vals[:, pos] = np.asarray(amb_fn(table_t), dtype=float)
        else:
            table_vals[:, pos] = temps0[idx]
    if comp.ambient_pos >= 0:
        temps0[comp.index[network.ambient_node]] = table_vals[0, comp.ambient_pos]

    servo = network.servo
    if servo is not None:
        if servo_integral0 is None:
            try:
                if comp.ambient_pos >= 0:
                    st = solve_steady_state(
                        network, ambient_k=float(table_vals[0, comp.ambient_pos])
                    )
                else:
                    st = solve_steady_state(network)
                integ0 = min(max(st.heater_power_w, 0.0), servo.p_max_w)
            except (SolverError, ValidationError):
                integ0 = 0.0
        else:
            integ0 = float(servo_integral0)
        sp, kp, ki, pmax = (
            servo.setpoint_k,
            servo.kp_w_per_k,
            servo.ki_w_per_k_s,
            servo.p_max_w,
        )
    else:
        integ0, sp, kp, ki, pmax = 0.0, 0.0, 0.0, 0.0, 0.0

    if record_every is None:
        record_every = max(1, n_steps // 2000)
    record_every = int(record_every)
    if record_every < 1:
        raise ValidationError("record_every must be >= 1")
    rec_steps = list(range(0, n_steps + 1, record_every))
    if rec_steps[-1] != n_steps:
        rec_steps.append(n_steps)
    n_rec = len(rec_steps)
    out_t = np.empty(n_rec)
    out_temps = np.empty((n_rec, len(comp.names)))
    out_heater = np.empty(n_rec)
    out_e_ext = np.empty(n_rec)
    out_e_heater = np.empty(n_rec)

    status = _kernels.thermal_transient(
        temps0,
        comp.inv_c,
        comp.const_load,
        comp.link_kind,
        comp.link_a,
        comp.link_b,
        comp.link_c1,
        comp.link_c2,
        comp.boundary_idx,
        table_t,
        table_vals,
        comp.ambient_pos,
        network.switch_threshold_k,
        comp.heater_idx,
        sp,
        kp,
        ki,
        pmax,
        integ0,
        float(dt_s),
        n_steps,
        record_every,
        out_t,
        out_temps,
        out_heater,
        out_e_ext,
        out_e_heater,
    )
    if status != 0:
        dt_max = _stability_suggestion(comp, comp.temps0, kp)
        raise IntegrationError(
            f"transient integration diverged with dt = {dt_s:g} s; "
            f"the fastest node time constant suggests dt <= {dt_max:.3g} s"
        )
    return TransientResult(
        node_names=comp.names,
        times_s=out_t,
        temps_k=out_temps,
        heater_w=out_heater,
        e_ext_j=out_e_ext,
        e_heater_j=out_e_heater,
        heat_caps_j_per_k=comp.heat_caps,
        boundary=comp.boundary,
        dt_s=float(dt_s),
    )


GOLD_EPS = 0.05
RADIATOR_EPS = 0.9
# Default sizing inputs: approximate stage loads of the default network at
# the 40 K ambient design point, and the matching radiator temperatures.
DEFAULT_SIZING_LOADS_W = (0.58, 0.013)
DEFAULT_SIZING_TARGETS_K = (31.0, 14.9)


def default_network() -> ThermalNetwork:
    """The baseline two-radiator, three-shield cryostat network.

    Effective (cryogenic) heat capacities and coupling strengths are design
    choices of this study, sized so that at 40 K ambient the chamber floats
    near 31 K, the actively heated shield holds 16 K with a few mW, and the
    cavity settles at the expansion zero crossing near 17 K.
    """
    gg = eps_eff_parallel(GOLD_EPS, GOLD_EPS)
    nodes = (
        ThermalNode("ambient", temperature_k=40.0, boundary=True),
        ThermalNode("space", temperature_k=T_DEEP_SPACE_K, boundary=True),
        ThermalNode("radiator1", heat_capacity_j_per_k=2000.0, temperature_k=29.0),
        ThermalNode(
            "chamber", heat_capacity_j_per_k=500.0, temperature_k=31.0, const_load_w=0.01
        ),
        ThermalNode("radiator2", heat_capacity_j_per_k=800.0, temperature_k=15.0),
        ThermalNode("active_shield", heat_capacity_j_per_k=50.0, temperature_k=16.0),
        ThermalNode("passive_shield", heat_capacity_j_per_k=20.0, temperature_k=16.3),
        ThermalNode(
            "cavity", heat_capacity_j_per_k=10.0, temperature_k=17.0, const_load_w=2.8e-5
        ),
    )
    links = (
        # Stage 1: chamber cooled by the first panel through the thermal switch.
        ThermalLink(RADIATIVE, "radiator1", "space", area_m2=15.0, eps_eff=RADIATOR_EPS),
        ThermalLink(CONDUCTIVE, "ambient", "radiator1", g_w_per_k=2e-3),
        ThermalLink(SWITCHABLE, "chamber", "radiator1", g_w_per_k=0.5, g_off_w_per_k=5e-3),
        ThermalLink(CONDUCTIVE, "ambient", "chamber", g_w_per_k=0.045),
        ThermalLink(RADIATIVE, "ambient", "chamber", area_m2=2.5, eps_eff=0.5),
        # Stage 2: actively held shield cooled by the second panel.
        ThermalLink(RADIATIVE, "radiator2", "space", area_m2=5.0, eps_eff=RADIATOR_EPS),
        ThermalLink(CONDUCTIVE, "ambient", "radiator2", g_w_per_k=5e-5),
        ThermalLink(CONDUCTIVE, "active_shield", "radiator2", g_w_per_k=0.01),
        ThermalLink(RADIATIVE, "chamber", "active_shield", area_m2=1.0, eps_eff=gg),
        ThermalLink(CONDUCTIVE, "chamber", "active_shield", g_w_per_k=1e-4),
        # Passive shield and cavity float on low-emissivity gold and Kevlar.
        ThermalLink(RADIATIVE, "passive_shield", "active_shield", area_m2=1.0, eps_eff=gg),
        ThermalLink(CONDUCTIVE, "passive_shield", "active_shield", g_w_per_k=5e-5),
        ThermalLink(RADIATIVE, "cavity", "passive_shield", area_m2=0.8, eps_eff=gg),
        ThermalLink(CONDUCTIVE, "cavity", "passive_shield", g_w_per_k=2e-5),
    )
    servo = HeaterServo(node="active_shield")
    return ThermalNetwork(nodes=nodes, links=links, servo=servo)
