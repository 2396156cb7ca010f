"""Scikit-learn style front end for the whole analysis pipeline.

``PartialGCDecomposition.fit`` accepts a plain ``(n_samples, n_channels)``
array (the sklearn orientation), runs preprocessing, order selection, model
fitting, the causality decomposition and, optionally, surrogate significance
testing, and exposes the outcome through fitted attributes. Parameters follow
the sklearn contract (``get_params``/``set_params``/``clone`` work), so the
analyzer drops into pipelines and grid searches that only need ``fit``.
"""

from __future__ import annotations

from dataclasses import replace

from sklearn.base import BaseEstimator

from .lattice import PdgcResult, decompose
from .series import Band, FrequencyGrid, MultivariateSeries, preprocess
from .state_space import var_to_ss
from .surrogates import SurrogateConfig, surrogate_test
from .validation import check_matrix
from .var import estimate_var, is_stable, select_order

__all__ = ["PartialGCDecomposition"]


def _as_bands(bands) -> tuple[Band, ...]:
    out = []
    for item in bands or ():
        if isinstance(item, Band):
            out.append(item)
        else:
            name, lo, hi = item
            out.append(Band(float(lo), float(hi), str(name)))
    return tuple(out)


class PartialGCDecomposition(BaseEstimator):
    """Decompose the Granger causality onto a target into PID components.

    Parameters
    ----------
    target : int or str
        Target channel (index into the columns of ``X``, or a label when
        ``labels`` is given).
    drivers : sequence of int or str, or None
        Driver channels (1 to 4 of them); ``None`` uses every other channel.
    fs : float
        Sampling frequency in Hz.
    order : int or None
        VAR order; ``None`` selects it by BIC over ``order_range``.
    order_range : (int, int)
        Inclusive BIC search range used when ``order`` is ``None``.
    n_freqs : int
        Number of frequency-grid points on [0, pi].
    bands : sequence of Band or (name, f_lo, f_hi) tuples
        Extra bands to integrate over (whole-band is always included).
    detrend_cutoff : float or None
        Cutoff in cycles/sample for slow-trend removal before mean removal.
    labels : sequence of str or None
        Channel names; defaults to ``ch0..ch{M-1}``.
    n_surrogates : int
        Surrogate replicates for significance testing; 0 skips the test.
    percentile : float
        One-sided significance percentile for the surrogate test.
    random_state : int
        Master seed for the surrogate streams.
    n_jobs : int
        Parallel surrogate replicates (joblib threads).

    Attributes
    ----------
    order_ : int
        VAR order actually used.
    model_ : VarModel
        Fitted VAR model.
    ss_ : StateSpaceModel
        Its state-space form.
    result_ : PdgcResult
        Decomposition curves, band tables and significance reports.
    """

    def __init__(
        self,
        target=-1,
        drivers=None,
        fs=1.0,
        order=None,
        order_range=(3, 12),
        n_freqs=1000,
        bands=(),
        detrend_cutoff=None,
        labels=None,
        n_surrogates=0,
        percentile=95.0,
        random_state=0,
        n_jobs=1,
    ):
        self.target = target
        self.drivers = drivers
        self.fs = fs
        self.order = order
        self.order_range = order_range
        self.n_freqs = n_freqs
        self.bands = bands
        self.detrend_cutoff = detrend_cutoff
        self.labels = labels
        self.n_surrogates = n_surrogates
        self.percentile = percentile
        self.random_state = random_state
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        """Run the full pipeline on ``X`` of shape (n_samples, n_channels)."""
        data = check_matrix(X, "X").T
        labels = (
            tuple(str(c) for c in self.labels)
            if self.labels is not None
            else tuple(f"ch{i}" for i in range(data.shape[0]))
        )
        series = preprocess(
            MultivariateSeries(data, labels, self.fs), self.detrend_cutoff
        )

        target = series.channel_index(self.target)
        if self.drivers is None:
            drivers = tuple(i for i in range(series.n_channels) if i != target)
        else:
            drivers = tuple(series.channel_index(d) for d in self.drivers)

        if self.order is not None:
            order = int(self.order)
        else:
            lo, hi = self.order_range
            order = select_order(series, int(lo), int(hi))
        model = estimate_var(series, order)
        stable, radius = is_stable(model)
        if not stable:
            raise RuntimeError(
                f"fitted VAR({order}) is unstable (spectral radius {radius:.4f}); "
                "consider detrending or a different order"
            )

        grid = FrequencyGrid.uniform(int(self.n_freqs), self.fs)
        bands = _as_bands(self.bands)
        ss = var_to_ss(model)
        result = decompose(ss, target, drivers, grid, bands)

        if self.n_surrogates:
            cfg = SurrogateConfig(
                n_surrogates=int(self.n_surrogates),
                percentile=float(self.percentile),
                seed=self.random_state,
                n_jobs=int(self.n_jobs),
            )
            result.significance = _significance(series, result, cfg, order)

        self.series_ = series
        self.order_ = order
        self.model_ = model
        self.ss_ = ss
        self.grid_ = grid
        self.result_ = result
        return self

    def band_value(self, curve: str, band: str = "whole") -> float:
        """Band-integrated value of a named curve from the fitted result."""
        self._check_fitted()
        return self.result_.band_values[curve][band]

    def _check_fitted(self):
        if not hasattr(self, "result_"):
            raise RuntimeError("this estimator is not fitted yet; call fit first")


def coarse_measures(result: PdgcResult) -> dict[str, dict[str, float]]:
    """Full and coarse band tables, keyed measure -> band, from a result."""
    names = ["full", "redundant", "synergistic"]
    names.extend(
        f"unique:{result.driver_label(i)}"
        for i in range(1, result.lattice.n_sources + 1)
    )
    return {name: dict(result.band_values[name]) for name in names}


def _significance(series, result: PdgcResult, cfg: SurrogateConfig, order: int):
    """Surrogate significance of the full and coarse measures, per band.

    The analysis closure refits the VAR at the original order on every
    surrogate set and recomputes the whole decomposition.
    """
    target, drivers = result.target, result.drivers
    grid, bands = result.grid, result.bands

    def analysis(s) -> dict[str, float]:
        model = estimate_var(s, order)
        res = decompose(var_to_ss(model), target, drivers, grid, bands)
        flat = {}
        for measure, per_band in coarse_measures(res).items():
            for band_name, value in per_band.items():
                flat[f"{measure}@{band_name}"] = value
        return flat

    reports = surrogate_test(series, analysis, cfg)
    nested: dict[str, dict] = {}
    for key, report in reports.items():
        measure, band_name = key.rsplit("@", 1)
        nested.setdefault(measure, {})[band_name] = replace(report, measure=measure)
    return nested
