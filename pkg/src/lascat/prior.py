"""Gaussian priors on the log-radius coefficients.

All three parametrizations share the same law in coefficient space: every
coefficient is an independent standard normal.  They differ only in how the
coefficients are weighted inside ``q`` (see :mod:`lascat.geometry`).
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .geometry import PriorKind

__all__ = ["PriorSpec", "RoughPriorWarning", "sample_prior", "prior_logdensity", "neg_log_prior"]


class RoughPriorWarning(UserWarning):
    """The QC parametrization lacks the regularity the well-posedness theory needs."""


@dataclass(frozen=True)
class PriorSpec:
    kind: PriorKind = PriorKind.QB
    N: int = 10

    def __post_init__(self):
        object.__setattr__(self, "kind", PriorKind(self.kind))
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"truncation N must be an integer >= 1, got {self.N}")
        object.__setattr__(self, "N", int(self.N))
        if self.kind is PriorKind.QC:
            warnings.warn(
                "prior 'qc' gives boundaries without C^2 regularity; posterior stability is not guaranteed",
                RoughPriorWarning,
                stacklevel=3,
            )

    @property
    def dim(self):
        return 2 * self.N + 1


def sample_prior(spec, seed=None):
    """Draw ``2N+1`` coefficients ``[a0, a1..aN, b1..bN]``."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return rng.standard_normal(spec.dim)


def prior_logdensity(spec, coeffs):
    """``-0.5 * sum(c**2)``; the normalizing constant is dropped."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (spec.dim,):
        raise ValueError(f"expected {spec.dim} coefficients for N={spec.N}, got shape {coeffs.shape}")
    return -0.5 * float(coeffs @ coeffs)


def neg_log_prior(coeffs):
    coeffs = np.asarray(coeffs, dtype=float)
    return 0.5 * float(coeffs @ coeffs)
