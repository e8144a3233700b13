"""Stochastic clock-noise synthesis and Allan-deviation analysis.

Trace convention: a :class:`ClockTrace` holds ``n`` fractional-frequency
samples ``y`` (each the average over one ``dt`` interval) and ``n + 1``
phase/time-error samples ``x`` with ``x[0] = 0`` and
``x[k+1] = x[k] + y[k] * dt`` exactly (the phase array is built by
sequential accumulation, so the recurrence holds bit-for-bit).

Synthesis is deterministic for a given seed: white Gaussian noise of a
power-of-two length is shaped in the frequency domain to the target
power-law spectrum ``S_y(f) = h0 + h_m1/f + h_m2/f^2`` (the DC bin is
zeroed), the requested ``n`` samples are cut from the centre of the inverse
transform to discard wrap-around transients, and the deterministic drift is
added as ``D * t`` evaluated at interval midpoints (which makes the
accumulated time error of a pure drift exactly ``D t^2 / 2``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ValidationError


def derive_seed(base_seed: int, index: int) -> int:
    """Documented seed-splitting rule for ensembles.

    Mixes ``(base_seed, index)`` through :class:`numpy.random.SeedSequence`
    and packs two output words into one 64-bit integer, so realisation
    streams are independent and reproducible.
    """
    words = np.random.SeedSequence((int(base_seed), int(index))).generate_state(2)
    return (int(words[0]) << 32) | int(words[1])


@dataclass(frozen=True)
class PowerLawModel:
    """Power-law fractional-frequency noise plus linear drift.

    ``S_y(f) = h0 + h_m1 / f + h_m2 / f^2`` (one-sided, 1/Hz), drift in 1/s
    per second.
    """

    h0: float = 0.0
    h_m1: float = 0.0
    h_m2: float = 0.0
    drift_per_s: float = 0.0

    def __post_init__(self):
        if min(self.h0, self.h_m1, self.h_m2) < 0.0:
            raise ValidationError("power-law coefficients must be >= 0")

    def psd(self, f):
        f = np.asarray(f, dtype=float)
        if np.any(f <= 0.0):
            raise ValidationError("frequencies must be positive")
        return self.h0 + self.h_m1 / f + self.h_m2 / f**2

    @classmethod
    def from_flicker_floor(cls, sigma_floor: float, drift_per_s: float = 0.0) -> "PowerLawModel":
        """Model whose flat Allan-deviation floor equals ``sigma_floor``."""
        if sigma_floor < 0.0:
            raise ValidationError("sigma_floor must be >= 0")
        return cls(h_m1=sigma_floor**2 / (2.0 * math.log(2.0)), drift_per_s=drift_per_s)

    @property
    def flicker_floor(self) -> float:
        return math.sqrt(2.0 * math.log(2.0) * self.h_m1)


@dataclass(frozen=True)
class ClockTrace:
    """Sampled fractional frequency and its accumulated time error."""

    dt_s: float
    y: np.ndarray
    x: np.ndarray
    seed: int | None = None
    model: PowerLawModel | None = None

    def __post_init__(self):
        if self.dt_s <= 0.0:
            raise ValidationError("dt_s must be > 0")
        y = np.asarray(self.y, dtype=float)
        x = np.asarray(self.x, dtype=float)
        if y.ndim != 1 or x.ndim != 1 or x.shape[0] != y.shape[0] + 1:
            raise ValidationError("need len(x) == len(y) + 1 with 1-d arrays")
        if x[0] != 0.0:
            raise ValidationError("x[0] must be 0")
        if not np.array_equal(x[1:], x[:-1] + y * self.dt_s):
            raise ValidationError("x must satisfy x[k+1] = x[k] + y[k]*dt exactly")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x", x)

    @classmethod
    def from_y(cls, dt_s: float, y, seed: int | None = None, model: PowerLawModel | None = None) -> "ClockTrace":
        y = np.asarray(y, dtype=float)
        x = np.empty(y.shape[0] + 1, dtype=float)
        x[0] = 0.0
        np.cumsum(y * dt_s, out=x[1:])
        return cls(dt_s=dt_s, y=y, x=x, seed=seed, model=model)

    @property
    def n(self) -> int:
        return int(self.y.shape[0])

    @property
    def duration_s(self) -> float:
        return self.n * self.dt_s

    def times(self) -> np.ndarray:
        """Sample times of the phase array ``x``."""
        return np.arange(self.n + 1, dtype=float) * self.dt_s


def _transform_length(n: int) -> int:
    # Smallest power of two >= n + 1, so there is always a margin to discard.
    return 1 << int(math.ceil(math.log2(n + 1)))


def synthesize(model: PowerLawModel, n: int, dt_s: float, seed: int) -> ClockTrace:
    """Generate one realisation of the model.

    Args:
        model: Spectral model plus drift.
        n: Number of frequency samples (>= 2).
        dt_s: Sample interval in s.
        seed: Mandatory integer seed; identical seeds reproduce the trace
            bit-for-bit on a given installation.

    Returns:
        The synthesised :class:`ClockTrace`.
    """
    if n < 2:
        raise ValidationError("n must be >= 2")
    if dt_s <= 0.0:
        raise ValidationError("dt_s must be > 0")
    if seed is None:
        raise ValidationError("seed is required for stochastic synthesis")
    rng = np.random.default_rng(int(seed))
    m_len = _transform_length(n)
    white = rng.standard_normal(m_len)
    spectrum = np.fft.rfft(white)
    f = np.fft.rfftfreq(m_len, d=dt_s)
    shape = np.zeros_like(f)
    if model.h0 or model.h_m1 or model.h_m2:
        shape[1:] = np.sqrt(model.psd(f[1:]) / (2.0 * dt_s))
    y_full = np.fft.irfft(spectrum * shape, n=m_len)
    offset = (m_len - n) // 2
    y = y_full[offset : offset + n].copy()
    if model.drift_per_s:
        y += model.drift_per_s * ((np.arange(n) + 0.5) * dt_s)
    return ClockTrace.from_y(dt_s, y, seed=int(seed), model=model)


@dataclass(frozen=True)
class AllanResult:
    """Allan deviation estimates on a set of averaging times."""

    variant: str
    tau_s: np.ndarray
    sigma_y: np.ndarray
    dof: np.ndarray  # number of squared terms entering each estimate


def _taus_to_lags(trace: ClockTrace, tau_s, variant: str) -> np.ndarray:
    n = trace.n
    taus = np.asarray(tau_s, dtype=float)
    if taus.ndim != 1 or taus.size == 0:
        raise ValidationError("tau_s must be a non-empty 1-d array")
    ms = np.rint(taus / trace.dt_s).astype(np.int64)
    bad = np.abs(taus - ms * trace.dt_s) > 1e-9 * trace.dt_s
    if np.any(bad):
        raise ValidationError(
            f"averaging times {taus[bad].tolist()} are not integer multiples of dt"
        )
    if np.any(ms < 1):
        raise ValidationError("averaging times must be >= dt")
    limit = n // 2 if variant == "overlapping" else (n + 1) // 3
    bad = ms > limit
    if np.any(bad):
        raise ValidationError(
            f"averaging times {taus[bad].tolist()} too long for a {n}-sample trace"
        )
    return ms


def default_taus(trace: ClockTrace, variant: str = "overlapping") -> np.ndarray:
    """Octave-spaced averaging times with adequate statistics."""
    limit = max(1, trace.n // 4)
    ms = []
    m = 1
    while m <= limit:
        ms.append(m)
        m *= 2
    return np.asarray(ms, dtype=float) * trace.dt_s


def allan_deviation(trace: ClockTrace, tau_s=None, variant: str = "overlapping") -> AllanResult:
    """Overlapping (default) or modified Allan deviation of a trace.

    Overlapping: ``sigma^2(m dt) = sum_i (x[i+2m] - 2 x[i+m] + x[i])^2 /
    (2 m^2 dt^2 (N - 2m))`` over all ``N - 2m`` phase second differences
    (``N = len(x)``).  Modified: the second differences are additionally
    averaged over ``m`` adjacent start indices before squaring.

    Args:
        trace: Input trace.
        tau_s: Averaging times (multiples of ``dt``); octave spacing by
            default.
        variant: ``"overlapping"`` or ``"modified"``.

    Returns:
        The :class:`AllanResult`; ``dof`` holds the per-tau term counts.
    """
    if variant not in ("overlapping", "modified"):
        raise ValidationError(f"unknown variant {variant!r}")
    if tau_s is None:
        tau_s = default_taus(trace, variant)
    ms = _taus_to_lags(trace, tau_s, variant)
    if variant == "overlapping":
        sums, counts = _kernels.adev_sums(trace.x, ms)
        var = sums / (2.0 * ms.astype(float) ** 2 * trace.dt_s**2 * counts)
    else:
        sums, counts = _kernels.madev_sums(trace.x, ms)
        var = sums / (2.0 * ms.astype(float) ** 4 * trace.dt_s**2 * counts)
    return AllanResult(
        variant=variant,
        tau_s=np.asarray(tau_s, dtype=float),
        sigma_y=np.sqrt(var),
        dof=counts,
    )


def ensemble_allan_deviation(
    model: PowerLawModel,
    n: int,
    dt_s: float,
    tau_s,
    n_seeds: int,
    seed: int,
    variant: str = "overlapping",
) -> AllanResult:
    """Root-mean Allan variance over ``n_seeds`` independent realisations.

    Realisation ``k`` uses :func:`derive_seed` ``(seed, k)``.
    """
    if n_seeds < 1:
        raise ValidationError("n_seeds must be >= 1")
    acc = None
    taus = np.asarray(tau_s, dtype=float)
    dof_total = None
    for k in range(n_seeds):
        trace = synthesize(model, n, dt_s, derive_seed(seed, k))
        res = allan_deviation(trace, taus, variant=variant)
        var = res.sigma_y**2
        acc = var if acc is None else acc + var
        dof_total = res.dof if dof_total is None else dof_total + res.dof
    return AllanResult(
        variant=variant, tau_s=taus, sigma_y=np.sqrt(acc / n_seeds), dof=dof_total
    )


def fit_remove_drift(trace: ClockTrace):
    """Least-squares linear drift estimate and the detrended trace.

    Fits ``y = a + D t`` at interval midpoints and removes the whole linear
    fit, so a pure-drift trace detrends to exactly zero frequency offset.

    Returns:
        ``(drift_per_s, detrended_trace)``.
    """
    t_mid = (np.arange(trace.n) + 0.5) * trace.dt_s
    tc = t_mid - t_mid.mean()
    denom = float(np.dot(tc, tc))
    if denom == 0.0:
        raise ValidationError("trace too short to fit a drift")
    slope = float(np.dot(tc, trace.y)) / denom
    intercept = float(trace.y.mean()) - slope * float(t_mid.mean())
    detrended = trace.y - (intercept + slope * t_mid)
    return slope, ClockTrace.from_y(trace.dt_s, detrended, seed=trace.seed, model=trace.model)


@dataclass(frozen=True)
class CoherenceResult:
    """Monte-Carlo coherence-time estimate at a given phase threshold."""

    tau_c_s: float
    ci_low_s: float
    ci_high_s: float
    censored: bool
    threshold_rad: float
    carrier_hz: float
    n_seeds: int
    span_s: float


def coherence_time(
    model: PowerLawModel,
    carrier_hz: float,
    n_seeds: int = 200,
    n: int = 8192,
    dt_s: float = 1.0,
    seed: int = 0,
    threshold_rad: float = 1.0,
    remove_drift: bool = True,
) -> CoherenceResult:
    """Largest lag whose rms accumulated optical phase stays at or below the
    threshold (1 rad by default).

    For each realisation the phase increment variance ``<(x(t+tau) -
    x(t))^2>`` is accumulated on a log-spaced lag grid; the pooled rms curve
    ``2 pi nu sqrt(<dx^2>)`` gives the estimate, and the spread of per-seed
    crossing lags gives a normal-approximation confidence interval.  Drift
    is removed per realisation first (the criterion applies to the random
    part).  If the pooled rms never exceeds the threshold within the
    simulated span the result is censored at the span and flagged.

    Returns:
        The :class:`CoherenceResult` (times in s).
    """
    if carrier_hz <= 0.0:
        raise ValidationError("carrier_hz must be > 0")
    if n_seeds < 2:
        raise ValidationError("n_seeds must be >= 2")
    if threshold_rad <= 0.0:
        raise ValidationError("threshold_rad must be > 0")
    # Lags beyond half the span are both starved of averaging and biased by
    # the per-realisation detrending, so the search stops at n // 2.
    max_lag = max(1, n // 2)
    grid = np.unique(
        np.rint(np.logspace(0.0, math.log10(max_lag), 160)).astype(np.int64)
    )
    pooled_sums = np.zeros(grid.shape[0])
    pooled_counts = np.zeros(grid.shape[0], dtype=np.int64)
    per_seed_tau = np.empty(n_seeds)
    scale = 2.0 * math.pi * carrier_hz
    for k in range(n_seeds):
        trace = synthesize(model, n, dt_s, derive_seed(seed, k))
        if remove_drift:
            _, trace = fit_remove_drift(trace)
        sums, counts = _kernels.lag_sq_sums(trace.x, grid)
        pooled_sums += sums
        pooled_counts += counts
        rms_k = scale * np.sqrt(sums / counts)
        per_seed_tau[k] = _crossing_lag(grid, rms_k, threshold_rad) * dt_s
    rms = scale * np.sqrt(pooled_sums / pooled_counts)
    tau_c = _crossing_lag(grid, rms, threshold_rad) * dt_s
    censored = not bool(np.any(rms > threshold_rad))
    half = 1.96 * float(np.std(per_seed_tau)) / math.sqrt(n_seeds)
    return CoherenceResult(
        tau_c_s=float(tau_c),
        ci_low_s=max(0.0, float(tau_c) - half),
        ci_high_s=float(tau_c) + half,
        censored=censored,
        threshold_rad=threshold_rad,
        carrier_hz=carrier_hz,
        n_seeds=n_seeds,
        span_s=max_lag * dt_s,
    )


def _crossing_lag(grid: np.ndarray, rms: np.ndarray, threshold: float) -> float:
    """Largest grid lag before the rms curve first exceeds the threshold."""
    above = np.nonzero(rms > threshold)[0]
    if above.size == 0:
        return float(grid[-1])
    first = int(above[0])
    if first == 0:
        return 0.0
    return float(grid[first - 1])
