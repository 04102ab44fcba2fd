"""Forward mapping Q = P S and the inverse problem: recover S from clicks.

The forward map multiplies a response matrix into a photon-number
distribution.  Reconstruction back-substitutes the upper-triangular system,
clips small negative components produced by noise, and fits a Poissonian to
recover the mean photon number two ways: directly on the forward-mapped
Poisson family (statistically better behaved under noise, reported as
``mu_fit``) and on the reconstructed distribution itself (``mu_recon``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import stats
from .errors import (
    ConfigurationError,
    DimensionMismatchError,
    NumericError,
    SingularSystemError,
)
from .pmatrix import ResponseMatrix
from .stats import PhotonStatistics

__all__ = [
    "ClickStatistics",
    "InversionResult",
    "ReconstructionResult",
    "forward",
    "invert_triangular",
    "fit_poisson_mu",
    "golden_section_minimize",
    "write_reconstruction_json",
    "write_reconstruction_csv",
]

_MU_TOL = 1e-7
_MAX_GOLDEN_ITER = 300


@dataclass(frozen=True)
class ClickStatistics:
    """Probability vector over click number n; sample_count is 0 when analytic."""

    probs: np.ndarray
    sample_count: int = 0

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.ndim != 1 or probs.size == 0:
            raise ConfigurationError("probs must be a nonempty vector")
        if np.any(probs < 0) or np.any(probs > 1 + 1e-12):
            raise ConfigurationError("click probabilities must lie in [0, 1]")
        if self.sample_count == 0 and abs(probs.sum() - 1.0) > 1e-9:
            raise ConfigurationError(
                f"analytic click statistics must sum to 1 within 1e-9, got {probs.sum()!r}"
            )
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)

    @property
    def n_max(self) -> int:
        return self.probs.size - 1

    def mean(self) -> float:
        return float(np.arange(self.probs.size) @ self.probs)

    @classmethod
    def from_counts(cls, counts) -> "ClickStatistics":
        counts = np.asarray(counts, dtype=np.float64)
        total = counts.sum()
        if total <= 0:
            raise ConfigurationError("empirical click histogram is empty")
        return cls(probs=counts / total, sample_count=int(round(total)))


@dataclass(frozen=True)
class InversionResult:
    """Reconstructed photon statistics plus the mass removed by clipping."""

    s: PhotonStatistics
    clipped_mass: float


@dataclass(frozen=True)
class ReconstructionResult:
    """Poisson-mean fit of measured click statistics.

    mu_fit   : least-squares fit of mu on the forward-mapped Poisson family
    mu_recon : Poisson fit to the triangular-inversion reconstruction
    fit_residual : sum of squared deviations between the fitted Poissonian
                   and the reconstructed distribution
    """

    s_hat: PhotonStatistics
    mu_fit: float
    mu_recon: float
    fit_residual: float
    clipped_mass: float

    def __post_init__(self):
        if self.mu_fit < 0 or self.mu_recon < 0:
            raise ConfigurationError("fitted mu must be >= 0")


def forward(
    p: ResponseMatrix, s: PhotonStatistics, allow_truncation: bool = False
) -> ClickStatistics:
    """Click statistics Q with Q_n = sum_m P[n, m] S_m.

    ``s`` is zero-padded when shorter than the matrix columns.  If ``s``
    extends beyond the matrix and ``allow_truncation`` is not set, the call
    fails rather than silently dropping photon-number mass.
    """
    probs = s.probs
    if s.m_max > p.m_max:
        dropped = float(probs[p.m_max + 1 :].sum())
        if not allow_truncation:
            raise DimensionMismatchError(
                f"input support (m_max={s.m_max}) exceeds matrix columns "
                f"(m_max={p.m_max}); pass allow_truncation=True to drop "
                f"{dropped:.3g} of probability mass"
            )
        probs = probs[: p.m_max + 1]
    q = p.entries[:, : probs.size] @ probs
    return ClickStatistics(probs=np.clip(q, 0.0, 1.0), sample_count=0)


def invert_triangular(p: ResponseMatrix, q: ClickStatistics) -> InversionResult:
    """Solve the upper-triangular system P s = q by back-substitution.

    Works on the square block of size len(q); negative components (sampling
    noise) are clipped to zero and the vector renormalized, with the clipped
    magnitude reported.
    """
    size = q.probs.size
    if size - 1 > p.n_max or size - 1 > p.m_max:
        raise DimensionMismatchError(
            f"click vector of length {size} needs a response matrix covering "
            f"n_max, m_max >= {size - 1}"
        )
    block = p.entries[:size, :size]
    diag = np.diagonal(block)
    if np.any(diag == 0.0):
        bad = int(np.argmin(diag != 0.0))
        raise SingularSystemError(
            f"response matrix diagonal is 0 at n={bad}; system is singular"
        )
    raw = np.zeros(size)
    for n in range(size - 1, -1, -1):
        raw[n] = (q.probs[n] - block[n, n + 1 :] @ raw[n + 1 :]) / block[n, n]
    clipped = float(-raw[raw < 0].sum()) if np.any(raw < 0) else 0.0
    clipped_vec = np.clip(raw, 0.0, None)
    total = clipped_vec.sum()
    if total <= 0:
        raise NumericError("reconstruction clipped to the zero vector")
    s_hat = stats.from_probs(clipped_vec)
    return InversionResult(s=s_hat, clipped_mass=clipped)


def golden_section_minimize(f, lo: float, hi: float, xtol: float):
    """Golden-section search for the minimum of a unimodal ``f`` on [lo, hi].

    The bracket [lo, hi] is maintained by construction at every step; the
    search raises :class:`NumericError` (carrying the best iterate) if the
    interval has not shrunk below ``xtol`` within the iteration cap.
    """
    if hi <= lo:
        raise ConfigurationError(f"invalid bracket [{lo}, {hi}]")
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(_MAX_GOLDEN_ITER):
        if b - a < xtol:
            x = 0.5 * (a + b)
            return x, f(x)
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    best = c if fc < fd else d
    raise NumericError(
        f"golden-section search did not reach xtol={xtol} within "
        f"{_MAX_GOLDEN_ITER} iterations",
        best_iterate=best,
    )


def _poisson_family_distance(p: ResponseMatrix, q: ClickStatistics):
    """Objective mu -> || forward(P, Poisson(mu)) - q ||^2 on the click block."""

    def objective(mu: float) -> float:
        s = stats.poisson(mu, m_max=max(p.m_max, stats.default_m_max(mu)))
        model = forward(p, s, allow_truncation=True).probs
        size = min(model.size, q.probs.size)
        resid = model[:size] - q.probs[:size]
        # mass at click numbers the model cannot reach still counts as error
        extra = q.probs[size:]
        return float(resid @ resid + extra @ extra)

    return objective


def fit_poisson_mu(p: ResponseMatrix, q: ClickStatistics) -> ReconstructionResult:
    """Fit the Poisson mean behind measured click statistics.

    Minimizes the squared distance between forward(P, Poisson(mu)) and q by
    golden-section search (derivative free, bracket [0, 2*click mean/eta + 1])
    to a tolerance of 1e-6 on mu.  Also reconstructs S by triangular
    inversion and fits a Poissonian to it; both estimates are reported.
    """
    eta = p.single_photon_efficiency
    if eta <= 0:
        raise SingularSystemError("cannot fit mu with zero single-photon efficiency")
    hi = 2.0 * q.mean() / eta + 1.0
    mu_fit, _ = golden_section_minimize(
        _poisson_family_distance(p, q), 0.0, hi, xtol=_MU_TOL
    )
    mu_fit = max(mu_fit, 0.0)
    if mu_fit < _MU_TOL:
        mu_fit = 0.0

    inversion = invert_triangular(p, q)
    s_hat = inversion.s

    def recon_distance(mu: float) -> float:
        model = stats.poisson(mu, m_max=s_hat.m_max).probs
        resid = model - s_hat.probs
        return float(resid @ resid)

    mu_recon, fit_residual = golden_section_minimize(
        recon_distance, 0.0, 2.0 * stats.mean(s_hat) + 1.0, xtol=_MU_TOL
    )
    mu_recon = max(mu_recon, 0.0)
    if mu_recon < _MU_TOL:
        mu_recon = 0.0
        fit_residual = recon_distance(0.0)
    return ReconstructionResult(
        s_hat=s_hat,
        mu_fit=mu_fit,
        mu_recon=mu_recon,
        fit_residual=fit_residual,
        clipped_mass=inversion.clipped_mass,
    )


def write_reconstruction_json(result: ReconstructionResult, path) -> None:
    payload = {
        "mu_fit": result.mu_fit,
        "mu_recon": result.mu_recon,
        "fit_residual": result.fit_residual,
        "clipped_mass": result.clipped_mass,
        "s_hat": [float(x) for x in result.s_hat.probs],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def write_reconstruction_csv(result: ReconstructionResult, path) -> None:
    """Reconstructed vs fitted distribution, one row per photon number."""
    fitted = stats.poisson(result.mu_fit, m_max=result.s_hat.m_max).probs
    with open(path, "w") as fh:
        fh.write("m,s_reconstructed,s_fitted\n")
        for m in range(result.s_hat.m_max + 1):
            fh.write(f"{m},{result.s_hat.probs[m]:.17g},{fitted[m]:.17g}\n")
