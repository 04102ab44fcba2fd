"""Detector response matrices P with P[n, m] = Pr(n clicks | m photons).

Three model families are supported:

* ``multiplexed``: an N-pixel array read out in parallel; photons are
  thinned binomially by the effective efficiency and routed uniformly to
  pixels, and the click count is the number of distinct occupied pixels.
* ``intrinsic``: an idealized detector whose n-photon efficiencies are
  eta^n; off-diagonal entries follow the standard binomial loss model.
* ``bsarray``: M discrete detectors behind a balanced splitter, identical
  to ``multiplexed`` with N = M and the splitter insertion loss folded
  into the effective efficiency.

Matrices are upper triangular (dark counts are excluded here; they live in
the Monte Carlo module) and column stochastic whenever the row range covers
min(m, N).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom as _binom

from .errors import ConfigurationError

__all__ = [
    "DetectorConfig",
    "ResponseMatrix",
    "occupancy_distribution",
    "occupancy_inclusion_exclusion",
    "build_multiplexed",
    "build_intrinsic",
    "build_bs_array",
    "multiplexed_diagonal",
    "n_photon_efficiencies",
    "write_matrix_csv",
    "read_matrix_csv",
]

MODEL_TAGS = ("multiplexed", "intrinsic", "bsarray")


def db_to_transmission(loss_db: float) -> float:
    """Convert an insertion loss in dB to a power transmission factor."""
    if loss_db < 0:
        raise ConfigurationError(f"loss must be >= 0 dB, got {loss_db}")
    return 10.0 ** (-loss_db / 10.0)


@dataclass(frozen=True)
class DetectorConfig:
    """Static detector parameters shared by the matrix builders and the simulator."""

    pixel_count: int
    eta: float
    splitter_loss_db: float = 0.0
    dark_count_rate: float = 0.0

    def __post_init__(self):
        if self.pixel_count < 1:
            raise ConfigurationError(f"pixel_count must be >= 1, got {self.pixel_count}")
        if not 0.0 <= self.eta <= 1.0:
            raise ConfigurationError(f"eta must lie in [0, 1], got {self.eta}")
        if self.splitter_loss_db < 0:
            raise ConfigurationError("splitter_loss_db must be >= 0")
        if self.dark_count_rate < 0:
            raise ConfigurationError("dark_count_rate must be >= 0")

    @property
    def eta_effective(self) -> float:
        """Single-photon efficiency including splitter loss."""
        return self.eta * db_to_transmission(self.splitter_loss_db)


@dataclass(frozen=True)
class ResponseMatrix:
    """Click-number response matrix; rows index clicks n, columns photons m."""

    entries: np.ndarray
    model_tag: str

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=np.float64)
        if entries.ndim != 2:
            raise ConfigurationError("entries must be a 2-D matrix")
        if self.model_tag not in MODEL_TAGS and self.model_tag != "custom":
            raise ConfigurationError(f"unknown model_tag {self.model_tag!r}")
        if np.any(entries < 0) or np.any(entries > 1 + 1e-12):
            raise ConfigurationError("matrix entries must lie in [0, 1]")
        if np.any(np.tril(entries, -1) != 0.0):
            raise ConfigurationError("entries with n > m must be exactly 0")
        entries.flags.writeable = False
        object.__setattr__(self, "entries", entries)

    @property
    def n_max(self) -> int:
        return self.entries.shape[0] - 1

    @property
    def m_max(self) -> int:
        return self.entries.shape[1] - 1

    @property
    def single_photon_efficiency(self) -> float:
        """P[1, 1], the 1-photon efficiency of the model."""
        return float(self.entries[1, 1]) if self.n_max >= 1 and self.m_max >= 1 else 0.0


def occupancy_distribution(k: int, pixels: int) -> np.ndarray:
    """Distribution of the number of occupied pixels after k uniform landings.

    Returns v of length pixels+1 with v[n] = Pr(exactly n pixels occupied).
    Computed with the one-step recurrence

        v_{k+1}[n] = v_k[n] * n/N + v_k[n-1] * (N-n+1)/N

    which is numerically stable (convex combinations only), unlike the
    alternating inclusion-exclusion sum.
    """
    if k < 0:
        raise ConfigurationError(f"k must be >= 0, got {k}")
    if pixels < 1:
        raise ConfigurationError(f"pixels must be >= 1, got {pixels}")
    return _occupancy_table(k, pixels)[k]


def _occupancy_table(k_max: int, pixels: int) -> np.ndarray:
    """Occupancy distributions for all k = 0..k_max, shape (k_max+1, pixels+1)."""
    table = np.zeros((k_max + 1, pixels + 1))
    table[0, 0] = 1.0
    n = np.arange(pixels + 1)
    stay = n / pixels
    grow = (pixels - n + 1) / pixels
    for k in range(k_max):
        v = table[k]
        nxt = table[k + 1]
        nxt[:] = v * stay
        nxt[1:] += v[:-1] * grow[1:]
    return table


def occupancy_inclusion_exclusion(k: int, pixels: int) -> np.ndarray:
    """Closed-form occupancy via inclusion-exclusion; cross-check only.

    Alternating sums cancel catastrophically for large k, so this form is
    intended for pixels <= 10 and moderate k.
    """
    if pixels > 10:
        raise ConfigurationError("inclusion-exclusion cross-check is limited to pixels <= 10")
    v = np.zeros(pixels + 1)
    for n in range(min(k, pixels) + 1):
        total = 0.0
        for j in range(n + 1):
            total += (-1) ** j * math.comb(n, j) * ((n - j) / pixels) ** k
        v[n] = math.comb(pixels, n) * total
    if k == 0:
        v[0] = 1.0
    return v


def multiplexed_diagonal(pixels: int, eta_eff: float, n: int) -> float:
    """n-photon efficiency N!/(N-n)! * (eta/N)^n of an N-pixel array."""
    if n > pixels:
        return 0.0
    return math.perm(pixels, n) * (eta_eff / pixels) ** n


def _binomial_pmf_column(m: int, eta: float) -> np.ndarray:
    """Pr(k photons survive thinning | m incident), k = 0..m."""
    k = np.arange(m + 1)
    if eta == 0.0:
        out = np.zeros(m + 1)
        out[0] = 1.0
        return out
    if eta == 1.0:
        out = np.zeros(m + 1)
        out[m] = 1.0
        return out
    return _binom.pmf(k, m, eta)


def build_multiplexed(
    cfg: DetectorConfig, m_max: int, n_max: int | None = None
) -> ResponseMatrix:
    """Response matrix of an N-pixel multiplexed array.

    P[n, m] = sum_k Binom(k; m, eta_eff) * occupancy(k, N)[n], with eta_eff
    including any configured splitter loss.  The diagonal equals
    N!/(N-n)! (eta_eff/N)^n.
    """
    if m_max < 0:
        raise ConfigurationError(f"m_max must be >= 0, got {m_max}")
    pixels = cfg.pixel_count
    if n_max is None:
        n_max = min(pixels, m_max)
    if n_max > pixels:
        raise ConfigurationError(
            f"an array of {pixels} pixels cannot produce {n_max} clicks"
        )
    eta_eff = cfg.eta_effective
    occ = _occupancy_table(m_max, pixels)[:, : n_max + 1]
    entries = np.zeros((n_max + 1, m_max + 1))
    for m in range(m_max + 1):
        pmf = _binomial_pmf_column(m, eta_eff)
        entries[:, m] = pmf @ occ[: m + 1]
    tag = "bsarray" if cfg.splitter_loss_db > 0 else "multiplexed"
    return ResponseMatrix(entries=entries, model_tag=tag)


def build_intrinsic(eta: float, m_max: int) -> ResponseMatrix:
    """Response matrix of an intrinsic photon-number resolver.

    The diagonal is eta^n; off-diagonal entries follow the binomial loss
    model C(m, n) eta^n (1-eta)^(m-n), which keeps columns stochastic.
    """
    if not 0.0 <= eta <= 1.0:
        raise ConfigurationError(f"eta must lie in [0, 1], got {eta}")
    if m_max < 0:
        raise ConfigurationError(f"m_max must be >= 0, got {m_max}")
    entries = np.zeros((m_max + 1, m_max + 1))
    for m in range(m_max + 1):
        entries[: m + 1, m] = _binomial_pmf_column(m, eta)
    return ResponseMatrix(entries=entries, model_tag="intrinsic")


def build_bs_array(
    detector_count: int,
    eta: float,
    splitter_loss_db: float,
    m_max: int,
    n_max: int | None = None,
) -> ResponseMatrix:
    """Response matrix of discrete detectors behind an ideal balanced splitter.

    Identical to :func:`build_multiplexed` with N = detector_count and the
    splitter loss folded into the effective efficiency.
    """
    cfg = DetectorConfig(
        pixel_count=detector_count, eta=eta, splitter_loss_db=splitter_loss_db
    )
    matrix = build_multiplexed(cfg, m_max, n_max=n_max)
    return ResponseMatrix(entries=matrix.entries, model_tag="bsarray")


def n_photon_efficiencies(p: ResponseMatrix, n_max: int) -> np.ndarray:
    """Diagonal [P_00, P_11, ..., P_nn] up to n_max."""
    if n_max < 0 or n_max > p.n_max or n_max > p.m_max:
        raise ConfigurationError(
            f"n_max={n_max} outside matrix bounds ({p.n_max} x {p.m_max})"
        )
    return np.diagonal(p.entries)[: n_max + 1].copy()


def write_matrix_csv(p: ResponseMatrix, path) -> None:
    """CSV with header "m=0,m=1,..." and one row per click number n."""
    with open(path, "w") as fh:
        fh.write(",".join(f"m={m}" for m in range(p.m_max + 1)) + "\n")
        for n in range(p.n_max + 1):
            fh.write(",".join(f"{x:.17g}" for x in p.entries[n]) + "\n")


def read_matrix_csv(path, model_tag: str = "custom") -> ResponseMatrix:
    """Read a matrix written by :func:`write_matrix_csv`."""
    with open(path) as fh:
        header = fh.readline()
        if not header.startswith("m="):
            raise ConfigurationError(f"{path} does not look like a response-matrix CSV")
        rows = [
            [float(tok) for tok in line.strip().split(",")]
            for line in fh
            if line.strip()
        ]
    return ResponseMatrix(entries=np.array(rows), model_tag=model_tag)
