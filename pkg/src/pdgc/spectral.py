"""Frequency-resolved and time-domain Granger causality measures.

The spectral measure from a driver subset to the target compares the target's
power spectral density with the part of it not attributable to the drivers'
innovations; its (1/pi)-normalized integral over [0, pi] recovers the
time-domain log variance ratio. Band-limited integrals use trapezoidal
quadrature with linear interpolation at band edges.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import NumericalError
from .series import Band, FrequencyGrid
from .state_space import StateSpaceModel, psd, reduce_ss, transfer_function
from .validation import check_channel_indices

__all__ = [
    "SpectralFunction",
    "GcValue",
    "spectral_gc",
    "time_gc_from_variance",
    "conditional_gc",
    "integrate_band",
]

# log arguments within this relative distance below 1 are treated as exactly 1
_LOG_CLAMP = 1e-12


@dataclass(frozen=True)
class SpectralFunction:
    """A real-valued curve over a frequency grid (nats per frequency)."""

    grid: FrequencyGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n_points,):
            raise ValueError(
                f"values shape {values.shape} does not match grid "
                f"({self.grid.n_points} points)"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("spectral values must all be finite")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def with_values(self, values: np.ndarray) -> "SpectralFunction":
        return SpectralFunction(self.grid, values)


@dataclass(frozen=True)
class GcValue:
    """A band-integrated causality value in nats; ``band=None`` marks whole-band."""

    value: float
    band: Band | None = None


def spectral_gc(
    ss: StateSpaceModel, target: int, drivers, grid: FrequencyGrid
) -> SpectralFunction:
    """Spectral Granger causality from a driver subset to the target.

    Builds the reduced model on ``(*drivers, target)`` and evaluates

        f(omega) = ln[ P_Y / (P_Y - H_21 partial_cov H_21*) ]

    where ``P_Y`` is the target entry of the reduced model's PSD and
    ``H_21`` the target row of its transfer function over the driver
    columns. The result is non-negative up to roundoff; log arguments within
    1e-12 below 1 are clamped to zero.
    """
    target, drivers = check_channel_indices(ss.n_channels, target, drivers)
    if not drivers:
        raise ValueError("drivers must be a nonempty subset")
    reduced = reduce_ss(ss, (*drivers, target))
    return _spectral_gc_reduced(reduced, grid, reduced.partial_cov)


def _spectral_gc_reduced(
    reduced, grid: FrequencyGrid, driver_cov: np.ndarray
) -> SpectralFunction:
    """Shared core: the measure evaluated with an arbitrary driver covariance."""
    h = transfer_function(reduced, grid)
    spectrum = psd(reduced, grid)
    p_y = spectrum[:, -1, -1].real
    h21 = h[:, -1, :-1]
    explained = np.einsum("fi,ij,fj->f", h21, driver_cov, h21.conj()).real
    denom = p_y - explained
    bad = denom <= 0
    if np.any(bad):
        worst = denom.min()
        raise NumericalError(
            f"non-positive causality denominator (min {worst:.3e}); "
            "the spectral factorization failed"
        )
    ratio = p_y / denom
    values = np.log(ratio)
    values[(ratio >= 1.0 - _LOG_CLAMP) & (ratio < 1.0)] = 0.0
    return SpectralFunction(grid, values)


def time_gc_from_variance(ss: StateSpaceModel, target: int, drivers=()) -> GcValue:
    """Time-domain causality as a log ratio of innovation variances.

    ``F = ln(var(target | own past) / var(target | own + driver past))``;
    both variances come from Riccati-reduced models. An empty driver set
    gives 0.
    """
    target, drivers = check_channel_indices(ss.n_channels, target, drivers)
    own = reduce_ss(ss, (target,)).target_variance
    if not drivers:
        return GcValue(0.0)
    full = reduce_ss(ss, (*drivers, target)).target_variance
    return GcValue(float(np.log(own / full)))


def conditional_gc(ss: StateSpaceModel, target: int, subset, drivers=None) -> GcValue:
    """Causality from ``subset`` to the target conditioned on the other drivers.

    Computed as F(all drivers -> target) - F(drivers \\ subset -> target).
    ``drivers`` defaults to every non-target channel.
    """
    if drivers is None:
        drivers = [i for i in range(ss.n_channels) if i != target]
    target, drivers = check_channel_indices(ss.n_channels, target, drivers)
    subset = tuple(int(i) for i in subset)
    if not subset:
        raise ValueError("subset must be nonempty")
    if not set(subset) <= set(drivers):
        raise ValueError(f"subset {subset} must be contained in drivers {drivers}")
    rest = tuple(d for d in drivers if d not in subset)
    full = time_gc_from_variance(ss, target, drivers).value
    reduced = time_gc_from_variance(ss, target, rest).value
    return GcValue(full - reduced)


def integrate_band(f: SpectralFunction, band: Band | None = None) -> GcValue:
    """(1/pi) trapezoidal integral of a curve, whole-band or band-limited.

    Band edges are given in Hz and mapped onto the grid via
    ``omega = 2 pi f / fs``; edges falling between grid points use linear
    interpolation of the curve at the exact edge.
    """
    omegas = f.grid.omegas
    values = f.values
    if band is None:
        return GcValue(float(np.trapezoid(values, omegas) / np.pi))

    nyquist = f.grid.fs / 2.0
    if band.f_hi > nyquist + 1e-12:
        raise ValueError(
            f"band [{band.f_lo}, {band.f_hi}] Hz exceeds the Nyquist frequency "
            f"{nyquist} Hz"
        )
    lo = f.grid.omega_of_hz(band.f_lo)
    hi = min(f.grid.omega_of_hz(band.f_hi), np.pi)
    inside = (omegas > lo) & (omegas < hi)
    xs = np.concatenate(([lo], omegas[inside], [hi]))
    ys = np.concatenate(
        ([np.interp(lo, omegas, values)], values[inside], [np.interp(hi, omegas, values)])
    )
    if xs.size < 2:
        raise ValueError(f"band {band.name!r} does not intersect the frequency grid")
    return GcValue(float(np.trapezoid(ys, xs) / np.pi), band)
