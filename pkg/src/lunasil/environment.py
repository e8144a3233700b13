"""Site environment models for a permanently shadowed lunar crater floor.

Covers the three environmental inputs the feasibility study needs: percentile
seismic acceleration spectra, the slow seasonal drift of the ambient
temperature, and static vacuum properties.  All quantities are SI; times for
the seasonal model are in days.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import GridClampWarning, ModelRangeWarning, ParseError, ValidationError

PERCENTILES = ("p10", "p50", "p90")

# Floor used so that log-log interpolation tolerates exact zeros in a
# parametric spectrum; anything at or below it maps back to 0.
_LOG_FLOOR = 1e-300


@dataclass(frozen=True)
class SeismicSpectrum:
    """Amplitude spectral density of ground acceleration vs frequency.

    Attributes:
        f_hz: Strictly increasing positive frequency grid.
        p10, p50, p90: ASD values in (m/s^2)/sqrt(Hz) at each grid point,
            ordered p10 <= p50 <= p90 pointwise.
        axis: Free-form axis tag ("vertical" or "horizontal").
    """

    f_hz: np.ndarray
    p10: np.ndarray
    p50: np.ndarray
    p90: np.ndarray
    axis: str = "vertical"

    def __post_init__(self):
        f = np.asarray(self.f_hz, dtype=float)
        if f.ndim != 1 or f.size < 2:
            raise ValidationError("seismic grid needs at least two frequencies")
        if np.any(f <= 0.0):
            raise ValidationError("seismic frequencies must be positive")
        if np.any(np.diff(f) <= 0.0):
            raise ValidationError("seismic frequencies must be strictly increasing")
        cols = {}
        for name in PERCENTILES:
            v = np.asarray(getattr(self, name), dtype=float)
            if v.shape != f.shape:
                raise ValidationError(f"{name} column length does not match grid")
            if np.any(v < 0.0) or not np.all(np.isfinite(v)):
                raise ValidationError(f"{name} values must be finite and >= 0")
            cols[name] = v
        if np.any(cols["p10"] > cols["p50"]) or np.any(cols["p50"] > cols["p90"]):
            raise ValidationError("percentile columns must satisfy p10 <= p50 <= p90")
        object.__setattr__(self, "f_hz", f)
        for name in PERCENTILES:
            object.__setattr__(self, name, cols[name])

    def asd(self, f, percentile: str = "p50") -> np.ndarray:
        """Interpolate the ASD at frequencies ``f`` (log-log interpolation).

        Queries outside the tabulated grid are clamped to the nearest
        endpoint and a ``GridClampWarning`` is emitted; the spectrum is never
        extrapolated.

        Args:
            f: Scalar or array of frequencies in Hz (must be > 0).
            percentile: One of ``"p10"``, ``"p50"``, ``"p90"``.

        Returns:
            ASD values in (m/s^2)/sqrt(Hz), same shape as ``f``.
        """
        if percentile not in PERCENTILES:
            raise ValidationError(f"unknown percentile {percentile!r}")
        fq = np.asarray(f, dtype=float)
        scalar = fq.ndim == 0
        fq = np.atleast_1d(fq)
        if np.any(fq <= 0.0):
            raise ValidationError("query frequencies must be positive")
        if np.any(fq < self.f_hz[0]) or np.any(fq > self.f_hz[-1]):
            warnings.warn(
                "seismic ASD queried outside the tabulated grid; clamping to "
                "the nearest endpoint",
                GridClampWarning,
                stacklevel=2,
            )
            fq = np.clip(fq, self.f_hz[0], self.f_hz[-1])
        v = np.maximum(getattr(self, percentile), _LOG_FLOOR)
        out = np.exp(np.interp(np.log(fq), np.log(self.f_hz), np.log(v)))
        out = np.where(out <= _LOG_FLOOR * 10.0, 0.0, out)
        return float(out[0]) if scalar else out


def load_seismic(path, axis: str = "vertical") -> SeismicSpectrum:
    """Load a percentile seismic spectrum from a CSV file.

    The file has the header ``f_hz,asd_p10,asd_p50,asd_p90``; lines starting
    with ``#`` (and blank lines) are ignored.

    Args:
        path: CSV file path.
        axis: Axis tag stored on the returned spectrum.

    Returns:
        The parsed and validated :class:`SeismicSpectrum`.

    Raises:
        ParseError: On a malformed header or row (message names the line).
        ValidationError: When parsed columns violate spectrum preconditions.
    """
    rows = []
    header = None
    with open(path, "r", newline="") as fh:
        for lineno, raw in enumerate(csv.reader(fh), start=1):
            if not raw or (raw[0].lstrip().startswith("#")):
                continue
            if all(not cell.strip() for cell in raw):
                continue
            if header is None:
                header = [cell.strip() for cell in raw]
                if header != ["f_hz", "asd_p10", "asd_p50", "asd_p90"]:
                    raise ParseError(
                        f"{path}: line {lineno}: expected header "
                        "'f_hz,asd_p10,asd_p50,asd_p90', got "
                        f"{','.join(header)!r}"
                    )
                continue
            if len(raw) != 4:
                raise ParseError(
                    f"{path}: line {lineno}: expected 4 columns, got {len(raw)}"
                )
            try:
                rows.append([float(cell) for cell in raw])
            except ValueError as exc:
                raise ParseError(f"{path}: line {lineno}: {exc}") from None
    if header is None:
        raise ParseError(f"{path}: missing header line")
    if not rows:
        raise ParseError(f"{path}: no data rows")
    data = np.asarray(rows, dtype=float)
    return SeismicSpectrum(
        f_hz=data[:, 0], p10=data[:, 1], p50=data[:, 2], p90=data[:, 3], axis=axis
    )


def parametric_seismic(
    level,
    slope: float = 0.0,
    f_min: float = 1e-4,
    f_max: float = 10.0,
    n: int = 61,
    axis: str = "vertical",
    percentile_ratios=(0.5, 1.0, 2.0),
) -> SeismicSpectrum:
    """Build a power-law spectrum ``asd(f) = level * f**slope``.

    ``level`` is the ASD at 1 Hz for the p50 column; the p10/p90 columns are
    scaled copies per ``percentile_ratios``.

    Args:
        level: p50 ASD at 1 Hz in (m/s^2)/sqrt(Hz), >= 0.
        slope: Power-law exponent.
        f_min, f_max: Grid span in Hz.
        n: Number of log-spaced grid points.
        axis: Axis tag.
        percentile_ratios: (p10, p50, p90) multipliers applied to ``level``.

    Returns:
        The tabulated :class:`SeismicSpectrum`.
    """
    if level < 0.0:
        raise ValidationError("level must be >= 0")
    if not (0.0 < f_min < f_max):
        raise ValidationError("need 0 < f_min < f_max")
    r10, r50, r90 = percentile_ratios
    if not (0.0 <= r10 <= r50 <= r90):
        raise ValidationError("percentile_ratios must be ordered and >= 0")
    f = np.logspace(math.log10(f_min), math.log10(f_max), int(n))
    base = level * f**slope
    return SeismicSpectrum(
        f_hz=f, p10=r10 * base, p50=r50 * base, p90=r90 * base, axis=axis
    )


@dataclass(frozen=True)
class TemperatureProfile:
    """Slew-rate-limited seasonal ambient temperature, callable in days.

    The profile is a trapezoid over one period: a plateau at ``t_min_k``
    around the epoch (taken as winter solstice), a ramp at exactly the slew
    limit, a plateau at ``t_max_k``, and a ramp back down.  When the slew
    limit is too slow for the swing to complete within half a period the
    profile degrades to a triangle wave starting at ``t_min_k`` whose peak
    falls short of ``t_max_k`` (a ``ModelRangeWarning`` is emitted when the
    profile is built).
    """

    t_min_k: float
    t_max_k: float
    slew_k_per_day: float
    period_days: float = 365.25
    phase_days: float = 0.0

    def __post_init__(self):
        if self.t_max_k < self.t_min_k:
            raise ValidationError("t_max_k must be >= t_min_k")
        if self.slew_k_per_day < 0.0:
            raise ValidationError("slew_k_per_day must be >= 0")
        if self.period_days <= 0.0:
            raise ValidationError("period_days must be > 0")
        if self.peak_k < self.t_max_k - 1e-12:
            warnings.warn(
                "slew limit cannot complete the seasonal swing within one "
                f"period; peak limited to {self.peak_k:.3f} K",
                ModelRangeWarning,
                stacklevel=3,
            )

    @property
    def ramp_days(self) -> float:
        swing = self.t_max_k - self.t_min_k
        if swing == 0.0:
            return 0.0
        if self.slew_k_per_day == 0.0:
            return math.inf
        return swing / self.slew_k_per_day

    @property
    def peak_k(self) -> float:
        """Highest temperature actually reached over a period."""
        if 2.0 * self.ramp_days <= self.period_days:
            return self.t_max_k
        return self.t_min_k + self.slew_k_per_day * self.period_days / 2.0

    def __call__(self, t_days):
        t = np.asarray(t_days, dtype=float)
        scalar = t.ndim == 0
        p = np.mod(t - self.phase_days, self.period_days)
        s = self.slew_k_per_day
        half = self.period_days / 2.0
        if 2.0 * self.ramp_days <= self.period_days:
            ramp = self.ramp_days
            dwell = (self.period_days - 2.0 * ramp) / 2.0
            # Segment edges: min plateau is split across the period boundary.
            e0 = dwell / 2.0
            e1 = e0 + ramp
            e2 = e1 + dwell
            e3 = e2 + ramp
            out = np.empty_like(p)
            out[p < e0] = self.t_min_k
            m = (p >= e0) & (p < e1)
            out[m] = self.t_min_k + s * (p[m] - e0)
            m = (p >= e1) & (p < e2)
            out[m] = self.t_max_k
            m = (p >= e2) & (p < e3)
            out[m] = self.t_max_k - s * (p[m] - e2)
            out[p >= e3] = self.t_min_k
        else:
            out = np.where(
                p < half,
                self.t_min_k + s * p,
                self.t_min_k + s * (self.period_days - p),
            )
        out = np.clip(out, self.t_min_k, self.t_max_k)
        return float(out) if scalar else out

    def at_seconds(self, t_seconds):
        return self(np.asarray(t_seconds, dtype=float) / 86400.0)


def seasonal_temperature(env: "PsrEnvironment", t_days, period_days: float = 365.25):
    """Evaluate the slew-limited seasonal ambient temperature.

    Args:
        env: Environment providing ``t_min_k``, ``t_max_k`` and the drift
            bound ``t_drift_k_per_day``.
        t_days: Time(s) since the winter-solstice epoch, in days.
        period_days: Seasonal period (default one Earth year).

    Returns:
        Ambient temperature(s) in K.
    """
    return env.temperature_profile(period_days)(t_days)


def _default_seismic() -> SeismicSpectrum:
    return parametric_seismic(level=1.2e-8, slope=0.0)


@dataclass(frozen=True)
class PsrEnvironment:
    """Environmental requirements at the instrument site.

    Attributes:
        t_min_k, t_max_k: Seasonal ambient temperature extremes.
        t_drift_k_per_day: Bound on the ambient temperature drift rate.
        pressure_pa: Static vacuum pressure.
        pressure_fluct_pa: Pressure fluctuation scale, read as a white ASD
            level in Pa/sqrt(Hz) for budget bookkeeping.
        seismic: Vertical-axis acceleration spectrum.
        seismic_horizontal: Optional horizontal-axis spectrum; when absent
            the vertical spectrum is reused for the horizontal axes.
        horizontal_scale: Multiplier applied to the horizontal spectrum.
    """

    t_min_k: float = 20.0
    t_max_k: float = 60.0
    t_drift_k_per_day: float = 0.05
    pressure_pa: float = 1e-10
    pressure_fluct_pa: float = 1e-10
    seismic: SeismicSpectrum = field(default_factory=_default_seismic)
    seismic_horizontal: SeismicSpectrum | None = None
    horizontal_scale: float = 1.0

    def __post_init__(self):
        if self.t_min_k <= 0.0 or self.t_max_k < self.t_min_k:
            raise ValidationError("need 0 < t_min_k <= t_max_k")
        if self.t_drift_k_per_day < 0.0:
            raise ValidationError("t_drift_k_per_day must be >= 0")
        if self.pressure_pa < 0.0 or self.pressure_fluct_pa < 0.0:
            raise ValidationError("pressures must be >= 0")
        if self.horizontal_scale < 0.0:
            raise ValidationError("horizontal_scale must be >= 0")

    def temperature_profile(self, period_days: float = 365.25) -> TemperatureProfile:
        return TemperatureProfile(
            t_min_k=self.t_min_k,
            t_max_k=self.t_max_k,
            slew_k_per_day=self.t_drift_k_per_day,
            period_days=period_days,
        )

    def horizontal_asd(self, f, percentile: str = "p50"):
        spec = self.seismic_horizontal if self.seismic_horizontal is not None else self.seismic
        return self.horizontal_scale * np.asarray(spec.asd(f, percentile))


def default_environment() -> PsrEnvironment:
    """The baseline site requirements used throughout the study."""
    return PsrEnvironment()
