"""Input validation helpers used by the library surface and the estimator."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from .exceptions import ValidationError


def check_matrix(data, name: str = "data") -> np.ndarray:
    """Coerce ``data`` to a 2-D float64 array and require all values finite."""
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 2:
        raise ValidationError(f"{name} must be 2-dimensional, got ndim={arr.ndim}")
    if not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(arr))[0]
        raise ValidationError(
            f"{name} contains a non-finite value at row {bad[0]}, column {bad[1]}"
        )
    return np.array(arr, dtype=float, order="C", copy=True)


def check_fs(fs: float) -> float:
    if not np.isfinite(fs) or fs <= 0:
        raise ValueError(f"sampling frequency must be positive, got {fs}")
    return float(fs)


def check_channel_indices(
    n_channels: int, target: int, drivers: Sequence[int]
) -> tuple[int, tuple[int, ...]]:
    """Validate a target/driver split over ``n_channels`` channels."""
    target = int(target)
    if not 0 <= target < n_channels:
        raise ValueError(f"target index {target} outside 0..{n_channels - 1}")
    drivers = tuple(int(d) for d in drivers)
    if len(set(drivers)) != len(drivers):
        raise ValueError(f"driver indices must be distinct, got {drivers}")
    for d in drivers:
        if not 0 <= d < n_channels:
            raise ValueError(f"driver index {d} outside 0..{n_channels - 1}")
    if target in drivers:
        raise ValueError(f"target index {target} cannot also be a driver")
    return target, drivers
