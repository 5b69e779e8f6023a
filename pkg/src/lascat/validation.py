"""Input validation helpers shared by the estimators."""

import numbers

import numpy as np

from .dataset import FarFieldData

__all__ = ["check_farfield", "check_location", "check_coefficients", "check_random_state_seed", "check_interval"]


def check_farfield(data):
    """Coerce ``data`` to :class:`FarFieldData` and reject empty apertures."""
    if isinstance(data, dict):
        from .dataset import farfield_from_dict

        data = farfield_from_dict(data)
    if not isinstance(data, FarFieldData):
        raise TypeError(f"expected FarFieldData, got {type(data).__name__}")
    if data.obs_angles.size == 0:
        raise ValueError("observation aperture is empty")
    if data.inc_angles.size == 0:
        raise ValueError("incidence aperture is empty")
    return data


def check_location(z0):
    z0 = np.asarray(z0, dtype=float)
    if z0.shape != (2,) or not np.all(np.isfinite(z0)):
        raise ValueError(f"location must be a finite 2-vector, got {z0!r}")
    return z0


def check_coefficients(coeffs, n_terms=None):
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.ndim != 1 or coeffs.size % 2 == 0:
        raise ValueError(f"coefficient vector must have odd length 2N+1, got shape {coeffs.shape}")
    if n_terms is not None and coeffs.size != 2 * n_terms + 1:
        raise ValueError(f"expected {2 * n_terms + 1} coefficients for N={n_terms}, got {coeffs.size}")
    return coeffs


def check_random_state_seed(seed):
    """Seeds must be ``None`` or a nonnegative integer so runs are reproducible."""
    if seed is None:
        return None
    if isinstance(seed, bool) or not isinstance(seed, numbers.Integral) or seed < 0:
        raise ValueError(f"seed must be a nonnegative integer or None, got {seed!r}")
    return int(seed)


def check_interval(name, value, lo, hi, closed=False):
    ok = lo <= value <= hi if closed else lo < value < hi
    if not ok:
        raise ValueError(f"{name} must lie in {'[' if closed else '('}{lo}, {hi}{']' if closed else ')'}, got {value}")
    return value
