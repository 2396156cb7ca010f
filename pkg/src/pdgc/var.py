"""Vector autoregressive model estimation, order selection, and simulation.

Models are fitted by ordinary least squares on the stacked one-step
regression (numerically via a QR/SVD solve, never the normal equations),
orders are selected by the Bayesian information criterion, and synthetic
processes are generated from Gaussian innovations for validation work.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .exceptions import EstimationError, ValidationError
from .series import MultivariateSeries
from .validation import check_matrix

__all__ = [
    "VarModel",
    "estimate_var",
    "select_order",
    "is_stable",
    "simulate_var",
    "companion_matrix",
]

# regressions whose Gram matrix condition number exceeds this are rejected
_GRAM_COND_LIMIT = 1e12
_STABILITY_MARGIN = 1e-10


@dataclass(frozen=True)
class VarModel:
    """A VAR(p) model: lag coefficient matrices plus innovation covariance.

    Parameters
    ----------
    coeffs : ndarray, shape (p, M, M)
        ``coeffs[k - 1]`` relates the present to the past at lag ``k``.
    sigma_u : ndarray, shape (M, M)
        Symmetric positive-definite innovation covariance.
    labels : tuple of str
        Channel names, length M.
    """

    coeffs: np.ndarray
    sigma_u: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        if coeffs.ndim != 3 or coeffs.shape[1] != coeffs.shape[2]:
            raise ValidationError(f"coeffs must be (p, M, M), got {coeffs.shape}")
        sigma_u = check_matrix(self.sigma_u, "sigma_u")
        m = coeffs.shape[1]
        if sigma_u.shape != (m, m):
            raise ValidationError(
                f"sigma_u shape {sigma_u.shape} does not match M={m}"
            )
        if not np.allclose(sigma_u, sigma_u.T, atol=1e-10):
            raise ValidationError("sigma_u must be symmetric")
        if np.linalg.eigvalsh(sigma_u).min() <= 0:
            raise ValidationError("sigma_u must be positive-definite")
        labels = tuple(str(c) for c in self.labels)
        if len(labels) != m:
            raise ValidationError(f"{len(labels)} labels for {m} channels")
        coeffs = np.ascontiguousarray(coeffs)
        coeffs.setflags(write=False)
        sigma_u.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "sigma_u", sigma_u)
        object.__setattr__(self, "labels", labels)

    @property
    def p(self) -> int:
        return self.coeffs.shape[0]

    @property
    def n_channels(self) -> int:
        return self.coeffs.shape[1]

    def to_dict(self) -> dict:
        """JSON-ready document: {p, coeffs (row-major per lag), sigma_u, labels}."""
        return {
            "p": self.p,
            "coeffs": [lag.tolist() for lag in self.coeffs],
            "sigma_u": self.sigma_u.tolist(),
            "labels": list(self.labels),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "VarModel":
        coeffs = np.asarray(doc["coeffs"], dtype=float)
        if coeffs.shape[0] != doc["p"]:
            raise ValidationError(
                f"document says p={doc['p']} but has {coeffs.shape[0]} lag matrices"
            )
        return cls(coeffs, np.asarray(doc["sigma_u"], dtype=float), tuple(doc["labels"]))

    def to_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, path) -> "VarModel":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def companion_matrix(coeffs: np.ndarray) -> np.ndarray:
    """Mp x Mp companion form: coefficient block row over a shifted identity."""
    p, m, _ = coeffs.shape
    top = np.hstack(list(coeffs))
    if p == 1:
        return top
    lower = np.hstack([np.eye(m * (p - 1)), np.zeros((m * (p - 1), m))])
    return np.vstack([top, lower])


def is_stable(model: VarModel) -> tuple[bool, float]:
    """Return (stable, spectral radius) of the model's companion matrix."""
    radius = float(np.abs(np.linalg.eigvals(companion_matrix(model.coeffs))).max())
    return radius < 1.0 - _STABILITY_MARGIN, radius


def _lagged_regression(data: np.ndarray, p: int, start: int):
    """Design matrix and response for the one-step regression over rows start..L-1.

    Regressor row n is [S_{n-1}; ...; S_{n-p}] flattened channel-major per lag.
    """
    m, length = data.shape
    rows = length - start
    regressors = np.empty((rows, m * p))
    for k in range(1, p + 1):
        regressors[:, (k - 1) * m : k * m] = data[:, start - k : length - k].T
    response = data[:, start:].T
    return regressors, response


def _fit_ols(data: np.ndarray, p: int, start: int):
    """OLS fit on the common sample range; returns (coeffs, sigma_u, residuals)."""
    regressors, response = _lagged_regression(data, p, start)
    gram_cond = np.linalg.cond(regressors) ** 2
    if not np.isfinite(gram_cond) or gram_cond > _GRAM_COND_LIMIT:
        raise EstimationError(
            f"regressor Gram matrix is ill-conditioned (condition number {gram_cond:.3g})"
        )
    beta, *_ = np.linalg.lstsq(regressors, response, rcond=None)
    residuals = response - regressors @ beta
    sigma_u = residuals.T @ residuals / residuals.shape[0]
    m = data.shape[0]
    coeffs = np.stack(
        [beta[(k - 1) * m : k * m].T for k in range(1, p + 1)], axis=0
    )
    return coeffs, sigma_u, residuals


def estimate_var(
    series: MultivariateSeries, p: int, *, sample_start: int | None = None
) -> VarModel:
    """Fit a VAR(p) by ordinary least squares.

    Coefficients minimize the summed squared one-step residuals over samples
    ``p..L-1`` (or ``sample_start..L-1`` when given, e.g. to fit several
    orders on a common range); the innovation covariance uses the
    maximum-likelihood divisor (number of regression rows).

    Raises
    ------
    ValueError
        ``p < 1`` or the series is too short (requires ``L > M * p + 1``).
    EstimationError
        Regressor Gram matrix condition number above 1e12.
    """
    p = int(p)
    if p < 1:
        raise ValueError(f"order must be >= 1, got {p}")
    m, length = series.data.shape
    start = p if sample_start is None else int(sample_start)
    if start < p:
        raise ValueError(f"sample_start {start} below order {p}")
    if length <= m * p + 1 or length - start <= m * p:
        raise ValueError(
            f"series too short for VAR({p}) with M={m}: need L > {m * p + 1}, got {length}"
        )
    coeffs, sigma_u, _ = _fit_ols(series.data, p, start)
    return VarModel(coeffs, sigma_u, series.labels)


def select_order(series: MultivariateSeries, p_min: int, p_max: int) -> int:
    """Pick the VAR order in ``p_min..p_max`` minimizing the BIC.

    All candidates are fitted on the common sample range ``p_max..L-1`` so
    their likelihoods are comparable; BIC(p) = ln det(sigma_u(p))
    + p * M^2 * ln(N) / N with N = L - p_max. Ties break toward smaller p.
    """
    p_min, p_max = int(p_min), int(p_max)
    if not 1 <= p_min <= p_max:
        raise ValueError(f"need 1 <= p_min <= p_max, got {p_min}..{p_max}")
    m, length = series.data.shape
    n_eff = length - p_max
    if n_eff <= m * p_max:
        raise ValueError(
            f"series too short to compare orders up to {p_max} (L={length})"
        )
    best_p, best_bic = p_min, np.inf
    for p in range(p_min, p_max + 1):
        _, sigma_u, _ = _fit_ols(series.data, p, p_max)
        sign, logdet = np.linalg.slogdet(sigma_u)
        if sign <= 0:
            raise EstimationError(f"singular residual covariance at order {p}")
        bic = logdet + p * m * m * np.log(n_eff) / n_eff
        if bic < best_bic - 1e-12:
            best_p, best_bic = p, bic
    return best_p


def simulate_var(
    model: VarModel, length: int, burn_in: int = 500, seed=0
) -> MultivariateSeries:
    """Simulate a stable VAR with Gaussian innovations; deterministic per seed.

    The innovation covariance enters through its Cholesky factor; the first
    ``burn_in`` samples are discarded.
    """
    stable, radius = is_stable(model)
    if not stable:
        raise ValueError(f"cannot simulate unstable model (radius {radius:.6f})")
    length, burn_in = int(length), int(burn_in)
    if length < 2:
        raise ValueError(f"length must be >= 2, got {length}")
    rng = np.random.default_rng(seed)
    m, p = model.n_channels, model.p
    chol = np.linalg.cholesky(model.sigma_u)
    total = length + burn_in
    innov = rng.standard_normal((total, m)) @ chol.T
    out = np.zeros((total, m))
    coeffs = model.coeffs
    for n in range(total):
        acc = innov[n].copy()
        for k in range(1, min(p, n) + 1):
            acc += coeffs[k - 1] @ out[n - k]
        out[n] = acc
    return MultivariateSeries(out[burn_in:].T, model.labels)
