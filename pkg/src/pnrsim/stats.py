"""Photon-number distributions: construction, truncation and queries.

A photon-number distribution is a finite probability vector ``probs`` over
photon number m = 0..m_max.  Constructors compute the untruncated terms in
log space (factorials overflow doubles above m ~ 170), record the mass that
fell beyond the truncation bound, and renormalize so downstream linear
algebra always operates on proper probability vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import ConfigurationError, DegenerateInputError

__all__ = [
    "PhotonStatistics",
    "poisson",
    "thermal",
    "from_probs",
    "renormalize_multiphoton",
    "mean",
    "default_m_max",
    "write_distribution",
    "read_distribution",
]

_NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True)
class PhotonStatistics:
    """Truncated photon-number distribution.

    probs     : probability of m photons, m = 0..m_max, sums to 1
    m_max     : truncation bound (len(probs) == m_max + 1)
    tail_mass : probability mass above m_max before renormalization
    mu        : nominal mean parameter of the source family (the mean of
                the vector itself for ad-hoc distributions)
    """

    probs: np.ndarray
    m_max: int
    tail_mass: float
    mu: float = field(default=0.0)

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.ndim != 1 or probs.size != self.m_max + 1:
            raise ConfigurationError(
                f"probs must be a vector of length m_max+1, got shape {probs.shape} "
                f"for m_max={self.m_max}"
            )
        if np.any(probs < -1e-15) or np.any(probs > 1 + 1e-12):
            raise ConfigurationError("probabilities must lie in [0, 1]")
        if abs(probs.sum() - 1.0) > _NORMALIZATION_TOL:
            raise ConfigurationError(
                f"probabilities must sum to 1 within {_NORMALIZATION_TOL}, "
                f"got {probs.sum()!r}"
            )
        if not 0.0 <= self.tail_mass < 1.0:
            raise ConfigurationError("tail_mass must lie in [0, 1)")
        probs = np.clip(probs, 0.0, 1.0)
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)

    def __len__(self):
        return self.m_max + 1


def default_m_max(mu: float) -> int:
    """Truncation bound ceil(4*mu + 20); Poisson mass beyond it is < 1e-12 for mu <= 10."""
    return int(math.ceil(4.0 * mu + 20.0))


def _finalize(raw: np.ndarray, mu: float) -> PhotonStatistics:
    total = float(raw.sum())
    tail = min(max(1.0 - total, 0.0), np.nextafter(1.0, 0.0))
    probs = raw / total
    return PhotonStatistics(probs=probs, m_max=raw.size - 1, tail_mass=tail, mu=mu)


def poisson(mu: float, m_max: int | None = None) -> PhotonStatistics:
    """Poissonian (coherent-state) photon statistics with mean ``mu``.

    Terms e^-mu mu^m / m! over m = 0..m_max, renormalized; the truncated
    tail mass is retained as a diagnostic.
    """
    if mu < 0:
        raise ConfigurationError(f"mu must be >= 0, got {mu}")
    if m_max is None:
        m_max = default_m_max(mu)
    if m_max < 0:
        raise ConfigurationError(f"m_max must be >= 0, got {m_max}")
    m = np.arange(m_max + 1)
    if mu == 0.0:
        raw = np.zeros(m_max + 1)
        raw[0] = 1.0
    else:
        raw = np.exp(-mu + m * math.log(mu) - gammaln(m + 1))
    return _finalize(raw, mu)


def thermal(mu: float, m_max: int | None = None) -> PhotonStatistics:
    """Single-mode thermal photon statistics mu^m / (1+mu)^(m+1) with mean ``mu``."""
    if mu < 0:
        raise ConfigurationError(f"mu must be >= 0, got {mu}")
    if m_max is None:
        m_max = default_m_max(mu)
    if m_max < 0:
        raise ConfigurationError(f"m_max must be >= 0, got {m_max}")
    m = np.arange(m_max + 1)
    if mu == 0.0:
        raw = np.zeros(m_max + 1)
        raw[0] = 1.0
    else:
        raw = np.exp(m * math.log(mu) - (m + 1) * math.log1p(mu))
    return _finalize(raw, mu)


def from_probs(probs, tail_mass: float = 0.0) -> PhotonStatistics:
    """Wrap an explicit probability vector (renormalized if slightly off 1)."""
    raw = np.asarray(probs, dtype=np.float64)
    if raw.ndim != 1 or raw.size == 0:
        raise ConfigurationError("probs must be a nonempty 1-D vector")
    if np.any(raw < 0):
        raise ConfigurationError("probabilities must be nonnegative")
    total = raw.sum()
    if total <= 0:
        raise ConfigurationError("probability vector sums to 0")
    probs = raw / total
    mu = float(np.arange(raw.size) @ probs)
    return PhotonStatistics(probs=probs, m_max=raw.size - 1, tail_mass=tail_mass, mu=mu)


def renormalize_multiphoton(s: PhotonStatistics) -> PhotonStatistics:
    """Condition on the >1-photon subspace: [0, 0, S2, S3, ...] / (1 - S0 - S1).

    Ratios S_i/S_j for i, j >= 2 are preserved exactly (one common divisor).
    """
    if s.m_max < 2:
        raise DegenerateInputError("distribution has no support above 1 photon")
    norm = 1.0 - s.probs[0] - s.probs[1]
    if norm <= 0.0:
        raise DegenerateInputError(
            "S_0 + S_1 = 1: no probability mass above 1 photon to condition on"
        )
    probs = s.probs.copy()
    probs[:2] = 0.0
    probs[2:] /= norm
    mu = float(np.arange(probs.size) @ probs)
    return PhotonStatistics(probs=probs, m_max=s.m_max, tail_mass=s.tail_mass, mu=mu)


def mean(s: PhotonStatistics) -> float:
    """First moment sum(m * probs[m]) of the truncated distribution."""
    return float(np.arange(s.m_max + 1) @ s.probs)


def write_distribution(s: PhotonStatistics, path) -> None:
    """Write the columnar text format: header line, then one "m <TAB> prob" per m."""
    with open(path, "w") as fh:
        fh.write(f"# mu={s.mu:.17g} m_max={s.m_max} tail_mass={s.tail_mass:.17g}\n")
        for m, p in enumerate(s.probs):
            fh.write(f"{m}\t{p:.17g}\n")


def read_distribution(path) -> PhotonStatistics:
    """Read the format produced by :func:`write_distribution`."""
    mu = 0.0
    tail_mass = 0.0
    values = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for token in line[1:].split():
                    key, _, val = token.partition("=")
                    if key == "mu":
                        mu = float(val)
                    elif key == "tail_mass":
                        tail_mass = float(val)
                continue
            m_str, _, p_str = line.partition("\t")
            values[int(m_str)] = float(p_str)
    if not values:
        raise ConfigurationError(f"no distribution rows found in {path}")
    m_max = max(values)
    probs = np.zeros(m_max + 1)
    for m, p in values.items():
        probs[m] = p
    out = from_probs(probs, tail_mass=tail_mass)
    return PhotonStatistics(probs=out.probs, m_max=out.m_max, tail_mass=tail_mass, mu=mu)
