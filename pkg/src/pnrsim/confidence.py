"""Bayesian click-discrimination confidences.

``confidence_n`` answers: given an n-click event, what is the probability
that exactly n photons arrived?  ``confidence_gt1`` answers the analogous
question for the >1-photon subspace, which is the figure of merit for
filtering multi-photon emission from heralded single-photon sources.  Both
are determined entirely by the response matrix and the photon statistics
of the input light.

The sweep utilities compare detector models over a mean-photon-number grid
with thermal input light, producing plot-ready curves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import stats
from .errors import ConfigurationError, DimensionMismatchError, UndefinedConditionalError
from .pmatrix import (
    DetectorConfig,
    ResponseMatrix,
    build_bs_array,
    build_intrinsic,
    build_multiplexed,
)
from .stats import PhotonStatistics

__all__ = [
    "METRICS",
    "ConfidenceCurve",
    "ModelSpec",
    "comparison_models",
    "confidence_n",
    "confidence_gt1",
    "confidence_n_mc",
    "default_mu_grid",
    "sweep_comparison",
    "thermal_for_sum",
    "write_curves_csv",
]

METRICS = ("c1", "c2", "c3", "c_gt1")

# relative tail mass below which the truncated sums stand in for the
# infinite ones
_TAIL_REL_TOL = 1e-12


def confidence_n(p: ResponseMatrix, s: PhotonStatistics, n: int) -> float:
    """Posterior probability that an n-click event came from exactly n photons.

    C_n = P[n, n] S_n / sum_{m >= n} P[n, m] S_m.  A zero denominator means
    the detector never produces n clicks for this input; that conditional is
    undefined and raises rather than returning 0 or 1.
    """
    if n < 0 or n > p.n_max:
        raise ConfigurationError(f"click number n={n} outside matrix rows (0..{p.n_max})")
    if s.m_max > p.m_max:
        raise DimensionMismatchError(
            f"input support m_max={s.m_max} exceeds matrix columns m_max={p.m_max}"
        )
    row = p.entries[n, : s.m_max + 1]
    q_n = float(row @ s.probs)
    if q_n <= 0.0:
        raise UndefinedConditionalError(
            f"Q_{n} = 0 for this input; confidence at {n} clicks is undefined"
        )
    numer = float(p.entries[n, n] * s.probs[n]) if n <= s.m_max else 0.0
    return min(numer / q_n, 1.0)


def confidence_gt1(p: ResponseMatrix, s: PhotonStatistics) -> float:
    """Probability that a >1-photon input registers as a >1-click event.

    The input statistics are first conditioned on the >1-photon subspace;
    the complement of the 0-click and 1-click response to that conditioned
    distribution is returned.
    """
    s_cond = stats.renormalize_multiphoton(s)
    if s_cond.m_max > p.m_max:
        raise DimensionMismatchError(
            f"input support m_max={s_cond.m_max} exceeds matrix columns m_max={p.m_max}"
        )
    probs = s_cond.probs
    p0 = float(p.entries[0, : probs.size] @ probs)
    p1 = float(p.entries[1, : probs.size] @ probs) if p.n_max >= 1 else 0.0
    return min(max(1.0 - p0 - p1, 0.0), 1.0)


def confidence_n_mc(
    p: ResponseMatrix, s: PhotonStatistics, n: int, samples: int, seed: int = 0
):
    """Monte Carlo estimate of :func:`confidence_n`, as an independent cross-check.

    Samples photon numbers from S and click numbers from the corresponding
    matrix column.  Returns (estimate, standard_error).
    """
    rng = np.random.Generator(np.random.Philox(key=seed))
    m_draws = rng.choice(s.m_max + 1, size=samples, p=s.probs)
    clicks = np.empty(samples, dtype=np.int64)
    for m in np.unique(m_draws):
        mask = m_draws == m
        column = p.entries[:, m]
        clicks[mask] = rng.choice(p.n_max + 1, size=int(mask.sum()), p=column / column.sum())
    n_click_events = clicks == n
    total = int(n_click_events.sum())
    if total == 0:
        raise UndefinedConditionalError(
            f"no {n}-click events in {samples} samples; conditional undefined"
        )
    hits = int((n_click_events & (m_draws == n)).sum())
    estimate = hits / total
    stderr = math.sqrt(max(estimate * (1.0 - estimate), 1.0 / total) / total)
    return estimate, stderr


@dataclass(frozen=True)
class ModelSpec:
    """One detector model entering a comparison sweep."""

    kind: str  # "intrinsic" | "multiplexed" | "bsarray"
    eta: float
    pixels: int | None = None
    loss_db: float = 0.0

    def __post_init__(self):
        if self.kind not in ("intrinsic", "multiplexed", "bsarray"):
            raise ConfigurationError(f"unknown model kind {self.kind!r}")
        if self.kind != "intrinsic" and (self.pixels is None or self.pixels < 1):
            raise ConfigurationError(f"{self.kind} model needs a pixel/detector count")

    @property
    def tag(self) -> str:
        if self.kind == "intrinsic":
            return "intrinsic"
        if self.kind == "multiplexed":
            return f"parallel{self.pixels}"
        return f"bsarray{self.pixels}"

    def build(self, m_max: int) -> ResponseMatrix:
        if self.kind == "intrinsic":
            return build_intrinsic(self.eta, m_max)
        if self.kind == "multiplexed":
            cfg = DetectorConfig(pixel_count=self.pixels, eta=self.eta)
            return build_multiplexed(cfg, m_max)
        return build_bs_array(self.pixels, self.eta, self.loss_db, m_max)


def comparison_models(eta: float = 0.9) -> list[ModelSpec]:
    """The standard three-way comparison: intrinsic resolver, 28-pixel
    parallel array, and 8 discrete detectors behind a 0.3 dB splitter."""
    return [
        ModelSpec(kind="intrinsic", eta=eta),
        ModelSpec(kind="multiplexed", eta=eta, pixels=28),
        ModelSpec(kind="bsarray", eta=eta, pixels=8, loss_db=0.3),
    ]


def default_mu_grid(points: int = 50) -> np.ndarray:
    """Logarithmic mean-photon-number grid over [0.01, 1]."""
    return np.logspace(math.log10(0.01), math.log10(1.0), points)


def thermal_for_sum(mu: float) -> PhotonStatistics:
    """Thermal statistics truncated so the tail is negligible in the sums.

    Extends the bound until the remaining tail mass is below 1e-12 of the
    accumulated probability.
    """
    m_max = stats.default_m_max(mu)
    s = stats.thermal(mu, m_max)
    while s.tail_mass > _TAIL_REL_TOL * (1.0 - s.tail_mass):
        m_max = int(m_max * 1.6) + 8
        s = stats.thermal(mu, m_max)
    return s


@dataclass(frozen=True)
class ConfidenceCurve:
    """Confidence values over a mean-photon-number grid for one model."""

    mu_grid: np.ndarray
    values: np.ndarray
    metric_tag: str
    model_tag: str
    defined: np.ndarray = field(default=None)

    def __post_init__(self):
        mu_grid = np.asarray(self.mu_grid, dtype=np.float64)
        values = np.asarray(self.values, dtype=np.float64)
        if mu_grid.shape != values.shape:
            raise ConfigurationError("mu_grid and values must have the same length")
        defined = self.defined
        if defined is None:
            defined = ~np.isnan(values)
        defined = np.asarray(defined, dtype=bool)
        finite = values[defined]
        if np.any(finite < -1e-12) or np.any(finite > 1 + 1e-12):
            raise ConfigurationError("confidence values must lie in [0, 1]")
        for arr in (mu_grid, values, defined):
            arr.flags.writeable = False
        object.__setattr__(self, "mu_grid", mu_grid)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "defined", defined)


def _metric_value(metric: str, p: ResponseMatrix, s: PhotonStatistics) -> float:
    if metric == "c_gt1":
        return confidence_gt1(p, s)
    return confidence_n(p, s, int(metric[1:]))


def sweep_comparison(
    mu_grid, eta: float, models: list[ModelSpec] | None = None, metric: str = "c1"
) -> list[ConfidenceCurve]:
    """One confidence curve per model over the grid, thermal input light.

    Grid points where the conditional is undefined are marked (NaN value,
    defined=False) rather than dropped.  Evaluation is pure per point, so
    results do not depend on evaluation order.
    """
    if metric not in METRICS:
        raise ConfigurationError(f"metric must be one of {METRICS}, got {metric!r}")
    mu_grid = np.asarray(mu_grid, dtype=np.float64)
    if mu_grid.size == 0:
        raise ConfigurationError("mu grid is empty")
    if models is None:
        models = comparison_models(eta)
    inputs = [thermal_for_sum(float(mu)) for mu in mu_grid]
    matrices = {}
    curves = []
    for model in models:
        values = np.empty(mu_grid.size)
        defined = np.ones(mu_grid.size, dtype=bool)
        for i, s in enumerate(inputs):
            key = (model, s.m_max)
            if key not in matrices:
                matrices[key] = model.build(s.m_max)
            try:
                values[i] = _metric_value(metric, matrices[key], s)
            except UndefinedConditionalError:
                values[i] = np.nan
                defined[i] = False
        curves.append(
            ConfidenceCurve(
                mu_grid=mu_grid.copy(),
                values=values,
                metric_tag=metric,
                model_tag=model.tag,
                defined=defined,
            )
        )
    return curves


def write_curves_csv(curves: list[ConfidenceCurve], path) -> None:
    """All curves in one CSV: mu, value, metric_tag, model_tag."""
    with open(path, "w") as fh:
        fh.write("mu,value,metric_tag,model_tag\n")
        for curve in curves:
            for mu, value in zip(curve.mu_grid, curve.values):
                fh.write(f"{mu:.17g},{value:.17g},{curve.metric_tag},{curve.model_tag}\n")
