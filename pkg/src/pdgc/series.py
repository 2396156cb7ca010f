"""Multivariate time-series containers, CSV ingestion, and preprocessing.

The frequency-axis convention used throughout the package is fixed here:
spectra live on a grid of normalized angular frequencies ``omega`` in
``[0, pi]`` (rad/sample), mapped to Hz via ``f = omega * fs / (2 * pi)`` so
that ``f`` spans ``[0, fs / 2]``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np
from scipy.signal import lfilter

from .exceptions import ParseError, ValidationError
from .validation import check_fs, check_matrix

__all__ = [
    "MultivariateSeries",
    "FrequencyGrid",
    "Band",
    "load_csv",
    "write_csv",
    "preprocess",
]


@dataclass(frozen=True)
class MultivariateSeries:
    """An M-channel record of L samples at a fixed sampling frequency.

    Parameters
    ----------
    data : ndarray, shape (M, L)
        One row per channel, one column per sample.
    labels : tuple of str
        Channel names, length M.
    fs : float
        Sampling frequency in Hz, > 0.
    """

    data: np.ndarray
    labels: tuple[str, ...]
    fs: float = 1.0

    def __post_init__(self):
        data = check_matrix(self.data, "series data")
        if data.shape[0] < 2:
            raise ValidationError(f"need at least 2 channels, got {data.shape[0]}")
        if data.shape[1] < 2:
            raise ValidationError(f"need at least 2 samples, got {data.shape[1]}")
        labels = tuple(str(c) for c in self.labels)
        if len(labels) != data.shape[0]:
            raise ValidationError(
                f"{len(labels)} labels for {data.shape[0]} channels"
            )
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "fs", check_fs(self.fs))

    @property
    def n_channels(self) -> int:
        return self.data.shape[0]

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]

    def channel_index(self, name: str | int) -> int:
        """Resolve a channel given by label or integer position."""
        if isinstance(name, (int, np.integer)):
            idx = int(name)
            if not 0 <= idx < self.n_channels:
                raise ValueError(f"channel index {idx} outside 0..{self.n_channels - 1}")
            return idx
        try:
            return self.labels.index(str(name))
        except ValueError:
            raise ValueError(
                f"unknown channel {name!r}; available: {', '.join(self.labels)}"
            ) from None


@dataclass(frozen=True)
class FrequencyGrid:
    """Strictly increasing normalized angular frequencies spanning [0, pi]."""

    omegas: np.ndarray
    fs: float = 1.0

    def __post_init__(self):
        omegas = np.asarray(self.omegas, dtype=float)
        if omegas.ndim != 1 or omegas.size < 16:
            raise ValueError(f"grid needs >= 16 points, got shape {omegas.shape}")
        if np.any(np.diff(omegas) <= 0):
            raise ValueError("grid frequencies must be strictly increasing")
        if omegas[0] != 0.0 or abs(omegas[-1] - np.pi) > 1e-12:
            raise ValueError("grid must span [0, pi] exactly")
        omegas = omegas.copy()
        omegas[-1] = np.pi
        omegas.setflags(write=False)
        object.__setattr__(self, "omegas", omegas)
        object.__setattr__(self, "fs", check_fs(self.fs))

    @classmethod
    def uniform(cls, n_points: int = 1000, fs: float = 1.0) -> "FrequencyGrid":
        return cls(np.linspace(0.0, np.pi, int(n_points)), fs)

    @property
    def n_points(self) -> int:
        return self.omegas.size

    @property
    def freqs_hz(self) -> np.ndarray:
        """Grid in Hz: f = omega * fs / (2 pi), spanning [0, fs / 2]."""
        return self.omegas * self.fs / (2.0 * np.pi)

    def omega_of_hz(self, f_hz: float) -> float:
        return 2.0 * np.pi * float(f_hz) / self.fs


@dataclass(frozen=True)
class Band:
    """A frequency band in Hz, used for band-limited integration."""

    f_lo: float
    f_hi: float
    name: str = ""

    def __post_init__(self):
        if not (0.0 <= self.f_lo < self.f_hi):
            raise ValueError(
                f"band must satisfy 0 <= f_lo < f_hi, got [{self.f_lo}, {self.f_hi}]"
            )
        if not self.name:
            object.__setattr__(self, "name", f"{self.f_lo:g}-{self.f_hi:g}Hz")


def load_csv(path, fs: float) -> MultivariateSeries:
    """Load a multivariate series from a CSV file, one sample per row.

    The file must be a rectangular numeric table with one column per channel
    and an optional single header row of channel labels. Labels default to
    ``ch0..ch{M-1}`` when no header is present.

    Raises
    ------
    ParseError
        Ragged or non-numeric rows (reported with their row index).
    ValidationError
        Non-finite cells, or fewer than 2 channels / 2 samples.
    ValueError
        ``fs <= 0``.
    """
    fs = check_fs(fs)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise ParseError(f"{path}: file is empty")

    labels = None
    first = rows[0]
    try:
        [float(cell) for cell in first]
    except ValueError:
        labels = tuple(cell.strip() for cell in first)
        rows = rows[1:]
    if not rows:
        raise ParseError(f"{path}: no data rows after header")

    n_cols = len(rows[0])
    data = np.empty((len(rows), n_cols))
    offset = 2 if labels is not None else 1  # 1-based file row of the first sample
    for i, row in enumerate(rows):
        if len(row) != n_cols:
            raise ParseError(
                f"{path}: row {i + offset} has {len(row)} fields, expected {n_cols}"
            )
        try:
            data[i] = [float(cell) for cell in row]
        except ValueError as exc:
            raise ParseError(f"{path}: row {i + offset}: {exc}") from None

    if labels is None:
        labels = tuple(f"ch{j}" for j in range(n_cols))
    bad = np.argwhere(~np.isfinite(data))
    if bad.size:
        i, j = bad[0]
        raise ValidationError(
            f"{path}: non-finite value at row {i + offset}, column {labels[j]!r}"
        )
    return MultivariateSeries(data.T, labels, fs)


def write_csv(series: MultivariateSeries, path) -> None:
    """Write a series as CSV (header row + one sample per row, 12 significant digits)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(series.labels)
        for row in series.data.T:
            writer.writerow([f"{v:.12g}" for v in row])


def _lowpass_pole(cutoff: float) -> float:
    """Pole of the single-pass smoother whose two-pass response is -3 dB at ``cutoff``."""
    # two passes multiply magnitudes, so each pass must be at 2^-1/4 amplitude
    r = 2.0 ** -0.5
    c = np.cos(2.0 * np.pi * cutoff)
    disc = (1.0 - r * c) ** 2 - (1.0 - r) ** 2
    return ((1.0 - r * c) - np.sqrt(disc)) / (1.0 - r)


def _slow_trend(x: np.ndarray, pole: float) -> np.ndarray:
    """Zero-phase first-order low-pass: forward pass, then backward pass."""
    b, a = [1.0 - pole], [1.0, -pole]
    fwd, _ = lfilter(b, a, x, zi=[pole * x[0]])
    bwd, _ = lfilter(b, a, fwd[::-1], zi=[pole * fwd[-1]])
    return bwd[::-1]


def preprocess(
    series: MultivariateSeries, detrend_cutoff: float | None = None
) -> MultivariateSeries:
    """Remove slow trends (optional) and the mean from every channel.

    Parameters
    ----------
    series : MultivariateSeries
    detrend_cutoff : float or None
        Cutoff in cycles/sample, within (0, 0.5). When given, each channel's
        slow trend -- the output of a zero-phase first-order low-pass run
        forward then backward, with the pole set so the -3 dB point of the
        combined response sits at the cutoff -- is subtracted before mean
        removal. ``None`` skips detrending.
    """
    data = np.array(series.data)
    if detrend_cutoff is not None:
        if not 0.0 < detrend_cutoff < 0.5:
            raise ValueError(
                f"detrend cutoff must lie in (0, 0.5) cycles/sample, got {detrend_cutoff}"
            )
        pole = _lowpass_pole(float(detrend_cutoff))
        for ch in range(data.shape[0]):
            data[ch] -= _slow_trend(data[ch], pole)
    # second pass absorbs the cancellation left by large offsets
    data -= data.mean(axis=1, keepdims=True)
    data -= data.mean(axis=1, keepdims=True)
    return replace(series, data=data)
