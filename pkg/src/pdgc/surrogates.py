"""IAAFT surrogate series and percentile-based significance testing.

Surrogates preserve each channel's amplitude distribution exactly and its
power spectrum approximately while destroying cross-channel dependence;
rerunning an analysis over many surrogate sets yields an empirical null
distribution for any causality measure.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from joblib import Parallel, delayed

from .exceptions import NumericalError
from .series import MultivariateSeries

__all__ = ["SurrogateConfig", "SignificanceReport", "iaaft", "surrogate_test"]


@dataclass(frozen=True)
class SurrogateConfig:
    """Settings for a surrogate significance test."""

    n_surrogates: int = 100
    max_iter: int = 200
    tol: float = 0.01
    percentile: float = 95.0
    seed: int = 0
    n_jobs: int = 1

    def __post_init__(self):
        if self.n_surrogates < 20:
            raise ValueError(f"need at least 20 surrogates, got {self.n_surrogates}")
        if not 50.0 < self.percentile < 100.0:
            raise ValueError(f"percentile must lie in (50, 100), got {self.percentile}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass(frozen=True)
class SignificanceReport:
    """Observed value of one measure against its surrogate distribution."""

    measure: str
    observed: float
    surrogate_values: tuple[float, ...]
    threshold: float
    significant: bool
    percentile: float

    def to_dict(self) -> dict:
        return {
            "measure": self.measure,
            "observed": self.observed,
            "threshold": self.threshold,
            "significant": self.significant,
            "percentile": self.percentile,
            "n_surrogates": len(self.surrogate_values),
            "surrogate_values": list(self.surrogate_values),
        }


def iaaft(channel, max_iter: int = 200, tol: float = 0.0, seed=None) -> np.ndarray:
    """One iterative amplitude-adjusted Fourier-transform surrogate.

    Starting from a seeded random permutation of the input, each iteration
    restores the original Fourier magnitudes (keeping the current phases) and
    then rank-remaps the values onto the original sorted amplitudes; a run
    ends when its rank permutation repeats. Because the fixed point reached
    depends on the starting permutation, runs restart from fresh seeded
    permutations until the total iteration budget ``max_iter`` is spent, and
    the surrogate with the smallest relative periodogram error is returned.
    A positive ``tol`` stops the restarts as soon as that error falls below
    it. The sorted output always equals the sorted input exactly.
    """
    x = np.asarray(channel, dtype=float)
    if x.ndim != 1 or x.size < 16:
        raise ValueError(f"need a 1-D channel of >= 16 samples, got shape {x.shape}")
    rng = np.random.default_rng(seed)
    amplitudes = np.sort(x)
    target_mags = np.abs(np.fft.rfft(x))
    target_power = target_mags**2
    power_norm = np.linalg.norm(target_power)

    norm = power_norm if power_norm > 0 else 1.0
    budget = int(max_iter)
    best, best_err = None, np.inf
    while budget > 0:
        current = rng.permutation(x)
        prev_ranks = None
        while budget > 0:
            budget -= 1
            spectrum = np.fft.rfft(current)
            mags = np.abs(spectrum)
            phases = np.where(mags > 0, spectrum / np.where(mags > 0, mags, 1.0), 1.0)
            matched = np.fft.irfft(target_mags * phases, n=x.size)
            ranks = np.argsort(matched)
            current = np.empty_like(x)
            current[ranks] = amplitudes
            if prev_ranks is not None and np.array_equal(ranks, prev_ranks):
                break
            prev_ranks = ranks
        err = np.linalg.norm(np.abs(np.fft.rfft(current)) ** 2 - target_power) / norm
        if err < best_err:
            best, best_err = current, err
        if tol > 0 and best_err < tol:
            break
    return best


def _surrogate_series(
    series: MultivariateSeries, seed: int, replicate: int, max_iter: int, tol: float
) -> MultivariateSeries:
    """IAAFT applied channel by channel with per-(replicate, channel) seed streams."""
    data = np.empty_like(series.data)
    for ch in range(series.n_channels):
        data[ch] = iaaft(
            series.data[ch], max_iter=max_iter, tol=tol, seed=[seed, replicate, ch]
        )
    return replace(series, data=data)


def _percentile_threshold(values: np.ndarray, percentile: float) -> float:
    ordered = np.sort(values)
    index = int(np.ceil(percentile / 100.0 * ordered.size)) - 1
    return float(ordered[index])


def surrogate_test(
    series: MultivariateSeries, analysis, cfg: SurrogateConfig
) -> dict[str, SignificanceReport]:
    """Empirical one-sided significance test of every measure in ``analysis``.

    ``analysis`` maps a series to a dict of named scalar measures; it is
    rerun on every surrogate set (the caller fixes nuisance choices such as
    the model order inside the closure). A measure is significant when its
    observed value exceeds the configured percentile of its surrogate
    distribution. Individual surrogate failures are tolerated up to 10% of
    the replicates.
    """
    observed = dict(analysis(series))

    def run_replicate(replicate: int):
        surrogate = _surrogate_series(
            series, cfg.seed, replicate, cfg.max_iter, cfg.tol
        )
        try:
            return dict(analysis(surrogate)), None
        except Exception as exc:
            return None, f"replicate {replicate}: {exc}"

    if cfg.n_jobs == 1:
        outcomes = [run_replicate(r) for r in range(cfg.n_surrogates)]
    else:
        outcomes = Parallel(n_jobs=cfg.n_jobs, backend="threading")(
            delayed(run_replicate)(r) for r in range(cfg.n_surrogates)
        )

    failures = [msg for _, msg in outcomes if msg is not None]
    if len(failures) > 0.1 * cfg.n_surrogates:
        raise NumericalError(
            f"{len(failures)}/{cfg.n_surrogates} surrogate analyses failed; "
            f"first failure: {failures[0]}"
        )
    rows = [values for values, _ in outcomes if values is not None]

    reports = {}
    for name, value in observed.items():
        draws = np.array([row[name] for row in rows], dtype=float)
        threshold = _percentile_threshold(draws, cfg.percentile)
        reports[name] = SignificanceReport(
            measure=name,
            observed=float(value),
            surrogate_values=tuple(float(v) for v in draws),
            threshold=threshold,
            significant=bool(value > threshold),
            percentile=cfg.percentile,
        )
    return reports
