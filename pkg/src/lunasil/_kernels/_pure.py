"""Fallback kernel implementations (numpy where vectorisable, plain loops
where the recurrence is sequential).  Signatures mirror the compiled module
``lunasil._kernels._core`` exactly."""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def adev_sums(x: np.ndarray, ms: np.ndarray):
    """Sum of squared overlapping second differences of phase per lag.

    Args:
        x: Phase samples (length N).
        ms: Integer lags, each with 2*m <= N - 1.

    Returns:
        ``(sums, counts)``: per-lag sum of ``(x[i+2m] - 2 x[i+m] + x[i])^2``
        and the number of terms ``N - 2m``.
    """
    x = np.asarray(x, dtype=np.float64)
    ms = np.asarray(ms, dtype=np.int64)
    sums = np.empty(ms.shape[0], dtype=np.float64)
    counts = np.empty(ms.shape[0], dtype=np.int64)
    for k, m in enumerate(ms):
        m = int(m)
        d = x[2 * m :] - 2.0 * x[m:-m] + x[: -2 * m]
        sums[k] = float(np.dot(d, d))
        counts[k] = d.shape[0]
    return sums, counts


def madev_sums(x: np.ndarray, ms: np.ndarray):
    """Sum of squared m-averaged second differences per lag (modified variant).

    Returns:
        ``(sums, counts)`` with ``counts = N - 3m + 1`` window positions.
    """
    x = np.asarray(x, dtype=np.float64)
    ms = np.asarray(ms, dtype=np.int64)
    sums = np.empty(ms.shape[0], dtype=np.float64)
    counts = np.empty(ms.shape[0], dtype=np.int64)
    for k, m in enumerate(ms):
        m = int(m)
        d = x[2 * m :] - 2.0 * x[m:-m] + x[: -2 * m]
        c = np.concatenate(([0.0], np.cumsum(d)))
        win = c[m:] - c[:-m]  # sliding sums of d over windows of length m
        sums[k] = float(np.dot(win, win))
        counts[k] = win.shape[0]
    return sums, counts


def lag_sq_sums(x: np.ndarray, ms: np.ndarray):
    """Sum of squared first differences ``(x[i+m] - x[i])^2`` per lag."""
    x = np.asarray(x, dtype=np.float64)
    ms = np.asarray(ms, dtype=np.int64)
    sums = np.empty(ms.shape[0], dtype=np.float64)
    counts = np.empty(ms.shape[0], dtype=np.int64)
    for k, m in enumerate(ms):
        m = int(m)
        d = x[m:] - x[:-m]
        sums[k] = float(np.dot(d, d))
        counts[k] = d.shape[0]
    return sums, counts


def _interp_scalar(t, xs, ys):
    # np.interp for a scalar, inlined to keep the step loop cheap.
    n = xs.shape[0]
    if t <= xs[0]:
        return ys[0]
    if t >= xs[n - 1]:
        return ys[n - 1]
    j = int(np.searchsorted(xs, t, side="right")) - 1
    frac = (t - xs[j]) / (xs[j + 1] - xs[j])
    return ys[j] + frac * (ys[j + 1] - ys[j])


def thermal_transient(
    temps0,
    inv_c,
    const_load,
    link_kind,
    link_a,
    link_b,
    link_c1,
    link_c2,
    boundary_idx,
    bnd_table_t,
    bnd_table_vals,
    ambient_pos,
    switch_threshold,
    heater_idx,
    setpoint,
    kp,
    ki,
    p_max,
    integ0,
    dt,
    n_steps,
    record_every,
    out_t,
    out_temps,
    out_heater,
    out_e_ext,
    out_e_heater,
):
    """Fixed-step RK4 integration of the thermal network.

    Link kinds: 0 conductive (coefficient in W/K), 1 radiative (coefficient
    sigma*eps_eff*A), 2 switchable conductive (c1 when the ambient driver is
    at or above the threshold, c2 otherwise).  Boundary node temperatures
    follow the piecewise-linear table; the heater (PI servo with clamped
    integral, zero-order hold over a step) acts on ``heater_idx``.

    Two energy accumulators are integrated with the same RK4 combination as
    the temperatures, so the discrete balance
    ``sum_i C_i dT_i = dE_ext + dE_heater`` holds to rounding: ``e_ext`` is
    boundary-link heat plus constant loads into free nodes, ``e_heater`` the
    heater energy.

    Records every ``record_every`` steps (plus the final step) into the
    ``out_*`` arrays.  Returns 0 on success, 1 when the free-node state left
    the physical bracket or went non-finite.
    """
    n_nodes = temps0.shape[0]
    n_links = link_kind.shape[0]
    n_bnd = boundary_idx.shape[0]

    state = np.array(temps0, dtype=np.float64)
    integ = float(integ0)
    e_ext = 0.0
    e_heater = 0.0
    heater_now = 0.0
    is_boundary = np.zeros(n_nodes, dtype=bool)
    is_boundary[boundary_idx] = True
    const_free_sum = float(np.sum(const_load[~is_boundary]))

    def set_boundary(t_abs, arr):
        for b in range(n_bnd):
            arr[boundary_idx[b]] = _interp_scalar(t_abs, bnd_table_t, bnd_table_vals[:, b])

    def rhs(arr, switch_on, p_heat):
        dT = const_load * inv_c
        e_rate = const_free_sum
        for li in range(n_links):
            a = link_a[li]
            b = link_b[li]
            kind = link_kind[li]
            if kind == 1:
                ta = arr[a]
                tb = arr[b]
                q = link_c1[li] * (ta * ta * ta * ta - tb * tb * tb * tb)
            else:
                g = link_c1[li]
                if kind == 2 and not switch_on:
                    g = link_c2[li]
                q = g * (arr[a] - arr[b])
            # q flows from node a to node b
            dT[a] -= q * inv_c[a]
            dT[b] += q * inv_c[b]
            if is_boundary[a] != is_boundary[b]:
                e_rate += q if is_boundary[a] else -q
        if heater_idx >= 0:
            dT[heater_idx] += p_heat * inv_c[heater_idx]
        return dT, e_rate

    rec = 0
    t_abs = 0.0
    for k in range(n_steps + 1):
        set_boundary(t_abs, state)
        amb = state[boundary_idx[ambient_pos]] if ambient_pos >= 0 else 0.0
        switch_on = amb >= switch_threshold
        if heater_idx >= 0:
            err = setpoint - state[heater_idx]
            heater_now = kp * err + integ
            if heater_now < 0.0:
                heater_now = 0.0
            elif heater_now > p_max:
                heater_now = p_max
        else:
            heater_now = 0.0

        if k % record_every == 0 or k == n_steps:
            out_t[rec] = t_abs
            out_temps[rec, :] = state
            out_heater[rec] = heater_now
            out_e_ext[rec] = e_ext
            out_e_heater[rec] = e_heater
            rec += 1
        if k == n_steps:
            break

        y0 = state.copy()
        k1, e1 = rhs(y0, switch_on, heater_now)
        y1 = y0 + 0.5 * dt * k1
        set_boundary(t_abs + 0.5 * dt, y1)
        k2, e2 = rhs(y1, switch_on, heater_now)
        y2 = y0 + 0.5 * dt * k2
        set_boundary(t_abs + 0.5 * dt, y2)
        k3, e3 = rhs(y2, switch_on, heater_now)
        y3 = y0 + dt * k3
        set_boundary(t_abs + dt, y3)
        k4, e4 = rhs(y3, switch_on, heater_now)

        state = y0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        e_ext += (dt / 6.0) * (e1 + 2.0 * e2 + 2.0 * e3 + e4)
        e_heater += heater_now * dt
        if heater_idx >= 0:
            integ += ki * (setpoint - state[heater_idx]) * dt
            if integ < 0.0:
                integ = 0.0
            elif integ > p_max:
                integ = p_max
        t_abs += dt

        free = state[~is_boundary]
        if not np.all(np.isfinite(free)) or np.any(free < 0.5) or np.any(free > 2000.0):
            return 1
    return 0
