# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled kernels: Allan-statistic inner sums and the thermal-network RK4
transient loop.  Mirrors ``lunasil._kernels._pure`` exactly."""

import numpy as np

from libc.math cimport isfinite

BACKEND = "compiled"


def adev_sums(x, ms):
    """Sum of squared overlapping second differences of phase per lag."""
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef long long[::1] mv = np.ascontiguousarray(ms, dtype=np.int64)
    cdef Py_ssize_t n = xv.shape[0]
    cdef Py_ssize_t nm = mv.shape[0]
    sums = np.empty(nm, dtype=np.float64)
    counts = np.empty(nm, dtype=np.int64)
    cdef double[::1] sv = sums
    cdef long long[::1] cv = counts
    cdef Py_ssize_t k, i, m
    cdef double acc, d
    for k in range(nm):
        m = <Py_ssize_t> mv[k]
        acc = 0.0
        for i in range(n - 2 * m):
            d = xv[i + 2 * m] - 2.0 * xv[i + m] + xv[i]
            acc += d * d
        sv[k] = acc
        cv[k] = n - 2 * m
    return sums, counts


def madev_sums(x, ms):
    """Sum of squared m-averaged second differences per lag (modified variant)."""
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef long long[::1] mv = np.ascontiguousarray(ms, dtype=np.int64)
    cdef Py_ssize_t n = xv.shape[0]
    cdef Py_ssize_t nm = mv.shape[0]
    sums = np.empty(nm, dtype=np.float64)
    counts = np.empty(nm, dtype=np.int64)
    cdef double[::1] sv = sums
    cdef long long[::1] cv = counts
    cdef Py_ssize_t k, i, m, nwin
    cdef double acc, win
    for k in range(nm):
        m = <Py_ssize_t> mv[k]
        nwin = n - 3 * m + 1
        # rolling sum of second differences over windows of length m
        win = 0.0
        for i in range(m):
            win += xv[i + 2 * m] - 2.0 * xv[i + m] + xv[i]
        acc = win * win
        for i in range(1, nwin):
            win += xv[i + 3 * m - 1] - 2.0 * xv[i + 2 * m - 1] + xv[i + m - 1]
            win -= xv[i + 2 * m - 1] - 2.0 * xv[i + m - 1] + xv[i - 1]
            acc += win * win
        sv[k] = acc
        cv[k] = nwin
    return sums, counts


def lag_sq_sums(x, ms):
    """Sum of squared first differences ``(x[i+m] - x[i])^2`` per lag."""
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef long long[::1] mv = np.ascontiguousarray(ms, dtype=np.int64)
    cdef Py_ssize_t n = xv.shape[0]
    cdef Py_ssize_t nm = mv.shape[0]
    sums = np.empty(nm, dtype=np.float64)
    counts = np.empty(nm, dtype=np.int64)
    cdef double[::1] sv = sums
    cdef long long[::1] cv = counts
    cdef Py_ssize_t k, i, m
    cdef double acc, d
    for k in range(nm):
        m = <Py_ssize_t> mv[k]
        acc = 0.0
        for i in range(n - m):
            d = xv[i + m] - xv[i]
            acc += d * d
        sv[k] = acc
        cv[k] = n - m
    return sums, counts


cdef double _interp_scalar(double t, double[::1] xs, double[:, ::1] ys,
                           Py_ssize_t col) noexcept:
    cdef Py_ssize_t n = xs.shape[0]
    cdef Py_ssize_t lo, hi, mid
    cdef double frac
    if t <= xs[0]:
        return ys[0, col]
    if t >= xs[n - 1]:
        return ys[n - 1, col]
    lo = 0
    hi = n - 1
    while hi - lo > 1:
        mid = (lo + hi) >> 1
        if xs[mid] <= t:
            lo = mid
        else:
            hi = mid
    frac = (t - xs[lo]) / (xs[lo + 1] - xs[lo])
    return ys[lo, col] + frac * (ys[lo + 1, col] - ys[lo, col])


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

    See the pure-Python twin for the full contract; behaviour is identical.
    """
    cdef double[::1] T0 = np.ascontiguousarray(temps0, dtype=np.float64)
    cdef double[::1] icv = np.ascontiguousarray(inv_c, dtype=np.float64)
    cdef double[::1] loadv = np.ascontiguousarray(const_load, dtype=np.float64)
    cdef int[::1] lkind = np.ascontiguousarray(link_kind, dtype=np.int32)
    cdef int[::1] la = np.ascontiguousarray(link_a, dtype=np.int32)
    cdef int[::1] lb = np.ascontiguousarray(link_b, dtype=np.int32)
    cdef double[::1] lc1 = np.ascontiguousarray(link_c1, dtype=np.float64)
    cdef double[::1] lc2 = np.ascontiguousarray(link_c2, dtype=np.float64)
    cdef int[::1] bidx = np.ascontiguousarray(boundary_idx, dtype=np.int32)
    cdef double[::1] btt = np.ascontiguousarray(bnd_table_t, dtype=np.float64)
    cdef double[:, ::1] btv = np.ascontiguousarray(bnd_table_vals, dtype=np.float64)
    cdef double[::1] o_t = out_t
    cdef double[:, ::1] o_T = out_temps
    cdef double[::1] o_h = out_heater
    cdef double[::1] o_ee = out_e_ext
    cdef double[::1] o_eh = out_e_heater

    cdef Py_ssize_t n_nodes = T0.shape[0]
    cdef Py_ssize_t n_links = lkind.shape[0]
    cdef Py_ssize_t n_bnd = bidx.shape[0]
    cdef int amb_pos = ambient_pos
    cdef double thr = switch_threshold
    cdef int h_idx = heater_idx
    cdef double sp = setpoint, kp_c = kp, ki_c = ki, pmax = p_max
    cdef double dt_c = dt
    cdef Py_ssize_t nsteps = n_steps
    cdef Py_ssize_t rec_every = record_every

    state_arr = np.array(temps0, dtype=np.float64)
    scratch = np.zeros((4, n_nodes), dtype=np.float64)
    dT_arr = np.zeros((4, n_nodes), dtype=np.float64)
    cdef double[::1] state = state_arr
    cdef double[:, ::1] ys = scratch
    cdef double[:, ::1] ks = dT_arr

    bmask_arr = np.zeros(n_nodes, dtype=np.int32)
    cdef int[::1] bmask = bmask_arr
    cdef Py_ssize_t i, j
    for i in range(n_bnd):
        bmask[bidx[i]] = 1
    cdef double const_free_sum = 0.0
    for i in range(n_nodes):
        if bmask[i] == 0:
            const_free_sum += loadv[i]

    cdef double integ = integ0
    cdef double e_ext = 0.0, e_heater = 0.0, heater_now = 0.0
    cdef double t_abs = 0.0
    cdef Py_ssize_t rec = 0, k, stage, src = 0
    cdef int switch_on
    cdef double amb, err, q, g, ta, tb, tsub, e_rate
    cdef double e_rates[4]
    cdef double stage_dt_off[4]

    stage_dt_off[0] = 0.0
    stage_dt_off[1] = 0.5 * dt_c
    stage_dt_off[2] = 0.5 * dt_c
    stage_dt_off[3] = dt_c

    for k in range(nsteps + 1):
        for j in range(n_bnd):
            state[bidx[j]] = _interp_scalar(t_abs, btt, btv, j)
        amb = state[bidx[amb_pos]] if amb_pos >= 0 else 0.0
        switch_on = 1 if amb >= thr else 0
        if h_idx >= 0:
            err = sp - state[h_idx]
            heater_now = kp_c * err + integ
            if heater_now < 0.0:
                heater_now = 0.0
            elif heater_now > pmax:
                heater_now = pmax
        else:
            heater_now = 0.0

        if k % rec_every == 0 or k == nsteps:
            o_t[rec] = t_abs
            for i in range(n_nodes):
                o_T[rec, i] = state[i]
            o_h[rec] = heater_now
            o_ee[rec] = e_ext
            o_eh[rec] = e_heater
            rec += 1
        if k == nsteps:
            break

        # ys[0] holds the step-start state; ys[1..3] the stage states.
        for i in range(n_nodes):
            ys[0, i] = state[i]
        for stage in range(4):
            if stage == 0:
                src = 0
            elif stage == 1:
                for i in range(n_nodes):
                    ys[1, i] = ys[0, i] + 0.5 * dt_c * ks[0, i]
                src = 1
            elif stage == 2:
                for i in range(n_nodes):
                    ys[2, i] = ys[0, i] + 0.5 * dt_c * ks[1, i]
                src = 2
            else:
                for i in range(n_nodes):
                    ys[3, i] = ys[0, i] + dt_c * ks[2, i]
                src = 3
            tsub = t_abs + stage_dt_off[stage]
            for j in range(n_bnd):
                ys[src, bidx[j]] = _interp_scalar(tsub, btt, btv, j)
            # rhs evaluation into ks[stage]
            e_rate = const_free_sum
            for i in range(n_nodes):
                ks[stage, i] = loadv[i] * icv[i]
            for j in range(n_links):
                if lkind[j] == 1:
                    ta = ys[src, la[j]]
                    tb = ys[src, lb[j]]
                    q = lc1[j] * (ta * ta * ta * ta - tb * tb * tb * tb)
                else:
                    g = lc1[j]
                    if lkind[j] == 2 and switch_on == 0:
                        g = lc2[j]
                    q = g * (ys[src, la[j]] - ys[src, lb[j]])
                ks[stage, la[j]] -= q * icv[la[j]]
                ks[stage, lb[j]] += q * icv[lb[j]]
                if bmask[la[j]] != bmask[lb[j]]:
                    if bmask[la[j]] == 1:
                        e_rate += q
                    else:
                        e_rate -= q
            if h_idx >= 0:
                ks[stage, h_idx] += heater_now * icv[h_idx]
            e_rates[stage] = e_rate

        for i in range(n_nodes):
            state[i] = ys[0, i] + (dt_c / 6.0) * (
                ks[0, i] + 2.0 * ks[1, i] + 2.0 * ks[2, i] + ks[3, i]
            )
        e_ext += (dt_c / 6.0) * (
            e_rates[0] + 2.0 * e_rates[1] + 2.0 * e_rates[2] + e_rates[3]
        )
        e_heater += heater_now * dt_c
        if h_idx >= 0:
            integ += ki_c * (sp - state[h_idx]) * dt_c
            if integ < 0.0:
                integ = 0.0
            elif integ > pmax:
                integ = pmax
        t_abs += dt_c

        for i in range(n_nodes):
            if bmask[i] == 0:
                if not isfinite(state[i]) or state[i] < 0.5 or state[i] > 2000.0:
                    return 1
    return 0
