"""Modeling, inference and Monte Carlo simulation for photon-number-resolving
multi-pixel single-photon detectors.

Subpackages and modules:

stats       photon-number distributions (Poissonian, thermal, custom)
pmatrix     detector response matrices and n-photon efficiencies
inference   forward click statistics and Poisson-mean reconstruction
confidence  Bayesian click-discrimination confidence metrics
mcsim       event-level Monte Carlo (count rate, recovery, amplitudes, jitter)
cli         command-line front end (``pnrsim`` entry point)
"""

__version__ = "0.1.0"

from . import confidence, errors, inference, pmatrix, stats  # noqa: F401
