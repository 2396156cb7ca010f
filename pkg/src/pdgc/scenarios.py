"""Canned ground-truth network scenarios with planted causal structure.

Each scenario fixes a small stable VAR whose decomposition has a known
dominant coarse component, so analyses can be validated either on the exact
generating model (quadrature-only error) or on simulated data (estimation
error on top).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .series import Band, MultivariateSeries
from .var import VarModel, simulate_var

__all__ = ["Scenario", "scenario", "get_scenario", "scenario_names"]


@dataclass(frozen=True)
class Scenario:
    """A named generator plus the qualitative signature it plants."""

    name: str
    description: str
    target: int
    drivers: tuple[int, ...]
    dominant: str | None          # curve name expected to dominate, None for null
    band: Band | None             # band where the signature is planted (fs = 1 Hz)
    build_model: Callable[[], VarModel]

    def simulate(self, length: int, seed=0, burn_in: int = 500) -> MultivariateSeries:
        return simulate_var(self.build_model(), length, burn_in=burn_in, seed=seed)


def _unidirectional_model() -> VarModel:
    # x1 -> y at lag 1 with gain 0.8; x2 is an independent bystander
    coeffs = np.zeros((1, 3, 3))
    coeffs[0, 0, 0] = 0.5
    coeffs[0, 1, 1] = 0.5
    coeffs[0, 2, 2] = 0.3
    coeffs[0, 2, 0] = 0.8
    return VarModel(coeffs, np.eye(3), ("x1", "x2", "y"))


def _common_drive_model() -> VarModel:
    # x1 oscillates in the low-frequency band (poles 0.9 e^{+-j 0.2 pi});
    # x2 replays x1's past with 1% innovation noise; y receives the same
    # oscillation through both drivers (lag 2 via x1, lag 1 via x2)
    r, theta, c = 0.9, 0.2 * np.pi, 0.4
    coeffs = np.zeros((2, 3, 3))
    coeffs[0, 0, 0] = 2 * r * np.cos(theta)
    coeffs[1, 0, 0] = -r * r
    coeffs[0, 1, 0] = 1.0
    coeffs[1, 2, 0] = c
    coeffs[0, 2, 1] = c
    coeffs[0, 2, 2] = 0.2
    return VarModel(coeffs, np.diag([1.0, 0.01, 1.0]), ("x1", "x2", "y"))


def _collider_model() -> VarModel:
    # y is driven by the difference of two nearly identical inputs: each
    # driver alone predicts little, together they predict a lot
    rho, a = 0.95, 2.0
    coeffs = np.zeros((1, 3, 3))
    coeffs[0, 0, 0] = 0.3
    coeffs[0, 1, 1] = 0.3
    coeffs[0, 2, 2] = 0.2
    coeffs[0, 2, 0] = a
    coeffs[0, 2, 1] = -a
    sigma = np.array([[1.0, rho, 0.0], [rho, 1.0, 0.0], [0.0, 0.0, 1.0]])
    return VarModel(coeffs, sigma, ("x1", "x2", "y"))


def _null_model() -> VarModel:
    # three independent first-order channels, no coupling anywhere
    coeffs = np.zeros((1, 3, 3))
    np.fill_diagonal(coeffs[0], 0.5)
    return VarModel(coeffs, np.eye(3), ("x1", "x2", "y"))


_REGISTRY: dict[str, Scenario] = {
    s.name: s
    for s in (
        Scenario(
            name="unidirectional",
            description="x1 drives y at lag 1 (gain 0.8); unique:x1 dominates",
            target=2,
            drivers=(0, 1),
            dominant="unique:x1",
            band=None,
            build_model=_unidirectional_model,
        ),
        Scenario(
            name="common-drive",
            description=(
                "x1 and x2 carry the same low-frequency oscillation to y; "
                "the redundant component dominates in the LF band"
            ),
            target=2,
            drivers=(0, 1),
            dominant="redundant",
            band=Band(0.03, 0.15, "lf"),
            build_model=_common_drive_model,
        ),
        Scenario(
            name="collider-interaction",
            description=(
                "y responds to the difference of two correlated inputs; "
                "the synergistic component dominates"
            ),
            target=2,
            drivers=(0, 1),
            dominant="synergistic",
            band=None,
            build_model=_collider_model,
        ),
        Scenario(
            name="null",
            description="independent channels; every causality measure is zero",
            target=2,
            drivers=(0, 1),
            dominant=None,
            band=None,
            build_model=_null_model,
        ),
    )
}


def scenario_names() -> tuple[str, ...]:
    return tuple(_REGISTRY)


def get_scenario(name: str) -> Scenario:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise ValueError(
            f"unknown scenario {name!r}; available: {', '.join(_REGISTRY)}"
        ) from None


def scenario(
    name: str, length: int = 250, seed=0, burn_in: int = 500
) -> tuple[MultivariateSeries, VarModel]:
    """Simulated series and the exact generating model for a named scenario."""
    spec = get_scenario(name)
    return spec.simulate(length, seed=seed, burn_in=burn_in), spec.build_model()
