"""State-space form of VAR models and exact reduced models for channel subsets.

A fitted VAR is rewritten in innovations form (transition matrix ``A``,
observation matrix ``C``, gain ``K``, innovation covariance ``V``). The
innovations form is closed under dropping channels: the reduced model for any
channel subset keeps the same state but acquires a new gain and innovation
covariance, found as the fixed point of a discrete algebraic Riccati
recursion. Transfer functions and power spectral densities follow directly
from either form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import NumericalError
from .series import FrequencyGrid
from .var import VarModel, companion_matrix, is_stable

__all__ = [
    "StateSpaceModel",
    "ReducedSsModel",
    "var_to_ss",
    "reduce_ss",
    "transfer_function",
    "psd",
]

_RICCATI_TOL = 1e-12
_RICCATI_MAX_ITER = 100_000


@dataclass(frozen=True)
class StateSpaceModel:
    """Innovations-form model of the full process.

    ``A`` is the Mp x Mp companion transition matrix, ``C`` the M x Mp
    observation matrix stacking the VAR lag coefficients, ``K`` the Mp x M
    gain injecting the observation noise into the state, and ``V`` the M x M
    innovation covariance.
    """

    A: np.ndarray
    C: np.ndarray
    K: np.ndarray
    V: np.ndarray
    labels: tuple[str, ...]

    @property
    def n_channels(self) -> int:
        return self.C.shape[0]

    @property
    def state_dim(self) -> int:
        return self.A.shape[0]


@dataclass(frozen=True)
class ReducedSsModel:
    """Exact innovations-form model of the channels in ``indices``.

    The state and transition matrix are inherited from the full model; the
    reduced gain ``K_r`` and innovation covariance ``sigma_w`` come from the
    Riccati fixed point. ``partial_cov`` is the covariance of the first
    ``K_r - 1`` innovations after regressing out the last one (the target):
    the driver block minus cross terms over the target variance.

    ``riccati_residual`` and ``iterations`` are convergence diagnostics of
    the fixed-point solve.
    """

    indices: tuple[int, ...]
    A: np.ndarray
    C_r: np.ndarray
    K_r: np.ndarray
    sigma_w: np.ndarray
    partial_cov: np.ndarray
    riccati_residual: float
    iterations: int

    @property
    def n_channels(self) -> int:
        return self.C_r.shape[0]

    @property
    def target_variance(self) -> float:
        """Innovation variance of the last channel in ``indices``."""
        return float(self.sigma_w[-1, -1])


def var_to_ss(model: VarModel) -> StateSpaceModel:
    """Rewrite a stable VAR(p) in innovations state-space form.

    The state stacks the last p observations, so ``C = [A_1 ... A_p]``,
    ``A`` is the companion matrix of ``C``, ``K = [I_M; 0]``, and ``V`` is
    the VAR innovation covariance.
    """
    stable, radius = is_stable(model)
    if not stable:
        raise ValueError(f"model must be stable (spectral radius {radius:.6f})")
    m, p = model.n_channels, model.p
    c = np.hstack(list(model.coeffs))
    a = companion_matrix(model.coeffs)
    k = np.vstack([np.eye(m), np.zeros((m * (p - 1), m))])
    return StateSpaceModel(a, c, k, np.array(model.sigma_u), model.labels)


def _riccati_step(p, a, c_r, q, s, r):
    apc = a @ p @ c_r.T + s
    inn = c_r @ p @ c_r.T + r
    try:
        gain = np.linalg.solve(inn, apc.T).T
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"singular innovation block in Riccati step: {exc}")
    nxt = a @ p @ a.T + q - gain @ apc.T
    return 0.5 * (nxt + nxt.T), gain, inn


def reduce_ss(ss: StateSpaceModel, indices) -> ReducedSsModel:
    """Derive the exact reduced model for an ordered channel subset.

    Iterates the Riccati recursion

        P <- A P A' + K V K' - (A P C_r' + K V E')(C_r P C_r' + E V E')^-1 (...)'

    from ``P = 0`` to its fixed point (relative Frobenius tolerance 1e-12),
    where ``E`` selects the chosen channels. Then
    ``sigma_w = C_r P C_r' + E V E'`` and ``K_r`` is the associated gain.
    The conditioning convention puts the target last in ``indices``.
    """
    indices = tuple(int(i) for i in indices)
    m = ss.n_channels
    if len(indices) < 1 or len(set(indices)) != len(indices):
        raise ValueError(f"indices must be a nonempty distinct subset, got {indices}")
    for i in indices:
        if not 0 <= i < m:
            raise ValueError(f"channel index {i} outside 0..{m - 1}")

    sel = np.asarray(indices)
    c_r = ss.C[sel]
    e_v = ss.V[sel]            # E V  (rows of V)
    r = e_v[:, sel]            # E V E'
    q = ss.K @ ss.V @ ss.K.T   # K V K'
    s = ss.K @ e_v.T           # K V E'

    p = np.zeros_like(ss.A)
    norm_prev = 0.0
    for iteration in range(1, _RICCATI_MAX_ITER + 1):
        p_next, gain, inn = _riccati_step(p, ss.A, c_r, q, s, r)
        delta = np.linalg.norm(p_next - p)
        p = p_next
        norm_prev = max(np.linalg.norm(p), 1.0)
        if delta <= _RICCATI_TOL * norm_prev:
            break
    else:
        raise NumericalError(
            f"Riccati recursion did not converge in {_RICCATI_MAX_ITER} iterations "
            f"(last relative update {delta / norm_prev:.3e})"
        )

    check, gain, inn = _riccati_step(p, ss.A, c_r, q, s, r)
    residual = float(np.linalg.norm(check - p) / max(np.linalg.norm(p), 1.0))
    sigma_w = 0.5 * (inn + inn.T)
    return ReducedSsModel(
        indices=indices,
        A=ss.A,
        C_r=c_r,
        K_r=gain,
        sigma_w=sigma_w,
        partial_cov=_partial_covariance(sigma_w),
        riccati_residual=residual,
        iterations=iteration,
    )


def _partial_covariance(sigma_w: np.ndarray) -> np.ndarray:
    """Driver-block covariance given the target: Schur complement of the last entry."""
    k = sigma_w.shape[0]
    if k == 1:
        return np.zeros((0, 0))
    s1 = sigma_w[:-1, :-1]
    s12 = sigma_w[:-1, -1:]
    return s1 - (s12 @ s12.T) / sigma_w[-1, -1]


def transfer_function(r: ReducedSsModel, grid: FrequencyGrid) -> np.ndarray:
    """Transfer function H(omega) = I + C_r (e^{j omega} I - A)^-1 K_r.

    Returns
    -------
    ndarray, complex, shape (Nf, K_r, K_r)
    """
    dim = r.A.shape[0]
    k = r.n_channels
    z = np.exp(1j * grid.omegas)
    resolvent_arg = z[:, None, None] * np.eye(dim) - r.A
    try:
        solved = np.linalg.solve(resolvent_arg, np.broadcast_to(r.K_r, (grid.n_points, dim, k)))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"singular resolvent on the frequency grid: {exc}")
    return np.eye(k) + r.C_r @ solved


def psd(r: ReducedSsModel, grid: FrequencyGrid) -> np.ndarray:
    """Power spectral density P(omega) = H(omega) sigma_w H(omega)*.

    Normalized so that (1/pi) * integral of the diagonal over [0, pi] equals
    the process variances.

    Returns
    -------
    ndarray, complex Hermitian per frequency, shape (Nf, K_r, K_r)
    """
    h = transfer_function(r, grid)
    p = h @ r.sigma_w @ h.conj().transpose(0, 2, 1)
    return 0.5 * (p + p.conj().transpose(0, 2, 1))
