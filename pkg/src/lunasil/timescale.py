"""Steered optical timescale: cavity flywheel disciplined to an atomic clock.

The free-running cavity (flicker floor plus linear drift) is compared to an
atomic standard at regular interrogation epochs.  Each comparison averages
the output frequency over the duty-cycle-weighted measurement time and adds
white-FM noise; a first-order servo converts it into a rate-limited
frequency correction.  Corrections never step the phase, so the reported
time error is continuous by construction.  During configured holdover
windows the last correction is held.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .clocknoise import (
    AllanResult,
    ClockTrace,
    PowerLawModel,
    allan_deviation,
    default_taus,
    derive_seed,
    synthesize,
)
from .errors import ValidationError


@dataclass(frozen=True)
class SteeringPolicy:
    """How and when the cavity output is disciplined to the atomic standard.

    Attributes:
        interrogation_interval_s: Spacing of atomic comparisons.
        duty_cycle: Fraction of each interval the atomic standard actually
            measures; the per-comparison noise scales as 1/sqrt(duty).
        servo_time_constant_s: First-order loop time constant; ``inf``
            disables steering (gain 0).
        atomic_white_fm: Atomic stability coefficient c with
            sigma_y(tau) = c / sqrt(tau).
        holdover_windows: ``(start_s, end_s)`` spans during which steering
            is suspended and the last correction held.
        max_correction: Largest fractional-frequency change a single update
            may apply (rate limit of the servo actuator).
    """

    interrogation_interval_s: float = 600.0
    duty_cycle: float = 0.5
    servo_time_constant_s: float = 3600.0
    atomic_white_fm: float = 3e-16
    holdover_windows: tuple = ()
    max_correction: float = 1e-12

    def __post_init__(self):
        if self.interrogation_interval_s <= 0.0:
            raise ValidationError("interrogation interval must be > 0")
        if not (0.0 < self.duty_cycle <= 1.0):
            raise ValidationError("duty cycle must lie in (0, 1]")
        if not (self.servo_time_constant_s > 0.0):
            raise ValidationError("servo time constant must be > 0 (inf allowed)")
        if self.atomic_white_fm < 0.0:
            raise ValidationError("atomic white-FM coefficient must be >= 0")
        if self.max_correction <= 0.0:
            raise ValidationError("max_correction must be > 0")
        for win in self.holdover_windows:
            if len(win) != 2 or not (0.0 <= win[0] < win[1]):
                raise ValidationError(f"bad holdover window {win!r}")

    @property
    def gain(self) -> float:
        """Per-update loop gain; 0 for an infinite time constant."""
        if math.isinf(self.servo_time_constant_s):
            return 0.0
        g = self.interrogation_interval_s / self.servo_time_constant_s
        return g

    def in_holdover(self, t_s: float) -> bool:
        return any(start <= t_s < end for start, end in self.holdover_windows)


def measurement_sigma(policy: SteeringPolicy) -> float:
    """White-FM noise of one atomic comparison.

    The atomic standard integrates for ``duty_cycle * interval`` seconds, so
    sigma = c / sqrt(interval * duty): halving the duty cycle costs exactly
    sqrt(2) in per-comparison noise.
    """
    return policy.atomic_white_fm / math.sqrt(
        policy.interrogation_interval_s * policy.duty_cycle
    )


@dataclass(frozen=True)
class TimescaleReport:
    """Outcome of a steered-timescale run."""

    dt_s: float
    time_error_s: np.ndarray  # vs the ideal reference, length n + 1
    steered_y: np.ndarray  # length n
    corrections: np.ndarray  # one applied correction per interrogation
    sigma: AllanResult
    max_holdover_error_s: float
    policy: SteeringPolicy
    seed: int

    @property
    def n(self) -> int:
        return self.steered_y.shape[0]

    @property
    def duration_s(self) -> float:
        return self.n * self.dt_s

    def times(self) -> np.ndarray:
        return np.arange(self.n + 1) * self.dt_s

    def sigma_y_at(self, tau_s: float):
        """Steered-output Allan deviation at one tau, or None if absent."""
        hit = np.isclose(self.sigma.tau_s, tau_s, rtol=1e-9)
        if not np.any(hit):
            return None
        return float(self.sigma.sigma_y[np.argmax(hit)])


def _report_taus(trace: ClockTrace) -> np.ndarray:
    n, dt_s = trace.n, trace.dt_s
    taus = list(default_taus(trace))
    day = 86400.0
    m = day / dt_s
    if abs(m - round(m)) < 1e-9 and round(m) <= n // 2 and not any(
        abs(t - day) < 1e-6 for t in taus
    ):
        taus.append(day)
    return np.sort(np.array(taus))


def _holdover_error(x: np.ndarray, dt_s: float, policy: SteeringPolicy, window) -> float:
    start, end = window
    n = x.shape[0] - 1
    i0 = int(round(start / dt_s))
    i1 = int(round(end / dt_s))
    i0 = min(max(i0, 0), n)
    i1 = min(max(i1, i0), n)
    if i1 == i0:
        return 0.0
    # Rate estimate from the interrogation interval preceding the window.
    k = int(round(policy.interrogation_interval_s / dt_s))
    if i0 >= k > 0:
        rate = (x[i0] - x[i0 - k]) / (k * dt_s)
    else:
        rate = 0.0
    t_rel = np.arange(i1 - i0 + 1) * dt_s
    excursion = x[i0 : i1 + 1] - x[i0] - rate * t_rel
    return float(np.max(np.abs(excursion)))


def holdover_error(report: TimescaleReport, window) -> float:
    """Largest time-error excursion across ``window`` beyond the linear
    extrapolation of the pre-window rate.

    For a pure drift D and a window much longer than the interrogation
    interval this approaches 0.5 * D * T^2.
    """
    start, end = window
    if not (0.0 <= start < end):
        raise ValidationError("window must satisfy 0 <= start < end")
    return _holdover_error(report.time_error_s, report.dt_s, report.policy, window)


def simulate_timescale(
    cavity_model: PowerLawModel,
    policy: SteeringPolicy,
    duration_s: float,
    dt_s: float = 60.0,
    seed: int = 0,
) -> TimescaleReport:
    """Run the steered timescale and report its stability and time error.

    Args:
        cavity_model: Free-running cavity noise model.
        policy: Steering configuration.
        duration_s: Total span; must cover at least ten interrogations.
        dt_s: Sample step; must divide the interrogation interval.
        seed: Base seed; the cavity trace and the atomic comparison noise
            use independent derived streams.

    Returns:
        The :class:`TimescaleReport`.  ``time_error_s`` is the steered
        clock's phase against the ideal reference; continuity holds because
        corrections only adjust frequency.
    """
    if duration_s < 10.0 * policy.interrogation_interval_s:
        raise ValidationError("duration must cover at least 10 interrogations")
    if dt_s <= 0.0:
        raise ValidationError("dt_s must be > 0")
    k = policy.interrogation_interval_s / dt_s
    if abs(k - round(k)) > 1e-9 or round(k) < 1:
        raise ValidationError("dt_s must divide the interrogation interval")
    k = int(round(k))
    n = int(round(duration_s / dt_s))
    n_meas = n // k

    cavity = synthesize(cavity_model, n, dt_s, seed=derive_seed(seed, 0))
    rng = np.random.default_rng(derive_seed(seed, 1))
    meas_noise = rng.standard_normal(n_meas) * measurement_sigma(policy)

    gain = policy.gain
    if gain >= 2.0:
        raise ValidationError(
            "servo time constant too short: per-update gain must stay below 2"
        )
    y_cav = cavity.y
    y_out = np.empty_like(y_cav)
    corrections = np.empty(n_meas)
    c = 0.0
    for j in range(n_meas):
        lo = j * k
        hi = lo + k
        seg = y_cav[lo:hi] + c
        y_out[lo:hi] = seg
        corrections[j] = c
        t_epoch = hi * dt_s
        if gain > 0.0 and not policy.in_holdover(t_epoch):
            delta = -gain * (float(np.mean(seg)) + meas_noise[j])
            delta = float(np.clip(delta, -policy.max_correction, policy.max_correction))
            c += delta
    if n_meas * k < n:
        y_out[n_meas * k :] = y_cav[n_meas * k :] + c

    steered = ClockTrace.from_y(dt_s, y_out, seed=seed, model=cavity_model)
    sigma = allan_deviation(steered, tau_s=_report_taus(steered))
    worst = 0.0
    for win in policy.holdover_windows:
        worst = max(worst, _holdover_error(steered.x, dt_s, policy, win))
    return TimescaleReport(
        dt_s=float(dt_s),
        time_error_s=steered.x,
        steered_y=y_out,
        corrections=corrections,
        sigma=sigma,
        max_holdover_error_s=worst,
        policy=policy,
        seed=seed,
    )
