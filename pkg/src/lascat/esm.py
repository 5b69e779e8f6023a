"""Extended sampling method: locate an obstacle from limited-aperture far-field data.

For each sampling point ``z`` the measured far field is fitted, in the
Tikhonov sense, by a superposition of far fields of a sound-soft probe
disc centred at ``z``.  The norm of the fitted density is the indicator;
its minimizer over the grid is the location estimate.
"""

import csv
import json
import math
import warnings
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .specfun import jy_table
from .validation import check_farfield

__all__ = [
    "EigenvalueProximityError",
    "IndicatorMap",
    "series_cutoff",
    "disc_coefficients",
    "disc_far_field",
    "translated_operator_row",
    "solve_regularized",
    "locate",
    "EsmLocator",
]


class EigenvalueProximityError(ValueError):
    """``k`` is too close to a Dirichlet eigenvalue of the probe disc."""


def series_cutoff(k, R):
    return max(30, math.ceil(k * R) + 20)


def disc_coefficients(R, k, n_cut=None):
    """Ratios ``J_n(kR) / H1_n(kR)`` for ``n = 0..n_cut``."""
    if R <= 0 or k <= 0:
        raise ValueError("probe radius and wavenumber must be positive")
    n_cut = series_cutoff(k, R) if n_cut is None else n_cut
    J, Y = jy_table(n_cut, np.array(k * R))
    # J_n(kR) can only vanish for n < kR
    oscillatory = np.arange(n_cut + 1) <= k * R
    if np.any(np.abs(J[oscillatory]) < 1e-8):
        raise EigenvalueProximityError(f"kR = {k * R} is within numerical distance of a disc eigenvalue")
    H = J + 1j * Y
    with np.errstate(invalid="ignore"):
        c = np.where(np.isfinite(Y), J / H, 0.0)
    return c


def disc_far_field(R, k, theta, n_cut=None):
    """Far field of the sound-soft disc of radius R at angle ``theta`` between x̂ and d."""
    c = disc_coefficients(R, k, n_cut)
    theta = np.asarray(theta, dtype=float)
    n = np.arange(1, c.size)
    series = c[0] + 2.0 * (np.cos(np.multiply.outer(theta, n)) @ c[1:])
    return -np.exp(-0.25j * np.pi) * np.sqrt(2.0 / (np.pi * k)) * series


def translated_operator_row(z, R, k, xhat, d, n_cut=None):
    """Far field of the disc centred at ``z`` for unit vectors ``xhat`` and ``d``."""
    z, xhat, d = (np.asarray(v, dtype=float) for v in (z, xhat, d))
    theta = np.arctan2(xhat[1] * d[0] - xhat[0] * d[1], xhat[0] * d[0] + xhat[1] * d[1])
    phase = np.exp(1j * k * (z[0] * (d[0] - xhat[0]) + z[1] * (d[1] - xhat[1])))
    return phase * disc_far_field(R, k, theta, n_cut)


def _tikhonov_filter(s, alpha_rel):
    alpha = (alpha_rel * s[0]) ** 2
    return s / (s**2 + alpha)


def solve_regularized(A, b, alpha_rel):
    """Tikhonov solution with ``alpha = (alpha_rel * s_max)^2``, via SVD."""
    A = np.asarray(A, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        raise np.linalg.LinAlgError("non-finite entries in regularized system")
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    if s[0] == 0:
        raise ValueError("operator is identically zero")
    return Vh.conj().T @ (_tikhonov_filter(s, alpha_rel) * (U.conj().T @ b))


def probe_operator(obs_angles, R, k, n_directions=64, n_cut=None):
    """Untranslated disc operator on the observation aperture, quadrature weight included."""
    y = 2.0 * np.pi * np.arange(n_directions) / n_directions
    theta = np.subtract.outer(obs_angles, y)
    return (2.0 * np.pi / n_directions) * disc_far_field(R, k, theta, n_cut), y


@dataclass(frozen=True)
class IndicatorMap:
    """Indicator values on a rectangular grid; ``values[iy, ix]``."""

    x: np.ndarray
    y: np.ndarray
    values: np.ndarray

    @property
    def argmin_index(self):
        return np.unravel_index(np.argmin(self.values), self.values.shape)

    @property
    def argmin(self):
        iy, ix = self.argmin_index
        return np.array([self.x[ix], self.y[iy]])

    @property
    def on_boundary(self):
        iy, ix = self.argmin_index
        ny, nx = self.values.shape
        return ix in (0, nx - 1) or iy in (0, ny - 1)

    def points(self):
        X, Y = np.meshgrid(self.x, self.y)
        return np.column_stack([X.ravel(), Y.ravel()])

    def summary(self, **extra):
        doc = {
            "argmin": self.argmin.tolist(),
            "indicator_min": float(self.values.min()),
            "on_boundary": bool(self.on_boundary),
            "grid": {
                "x_min": float(self.x[0]),
                "x_max": float(self.x[-1]),
                "y_min": float(self.y[0]),
                "y_max": float(self.y[-1]),
                "nx": int(self.x.size),
                "ny": int(self.y.size),
            },
        }
        doc.update(extra)
        return doc

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["z_x", "z_y", "I_z"])
            for (zx, zy), v in zip(self.points(), self.values.ravel()):
                w.writerow([repr(float(zx)), repr(float(zy)), repr(float(v))])

    def write_summary(self, path, **extra):
        with open(path, "w") as fh:
            json.dump(self.summary(**extra), fh, indent=2)
            fh.write("\n")


def _grid_axis(lo, hi, h):
    n = int(round((hi - lo) / h)) + 1
    return lo + h * np.arange(n)


def locate(data, radius=2.0, extent=(-3.0, 3.0, -3.0, 3.0), spacing=0.1, alpha_rel=1e-2, n_directions=64):
    """Indicator map of the extended sampling method for ``data``."""
    data = check_farfield(data)
    if not 0 < alpha_rel < 1:
        raise ValueError("alpha_rel must lie in (0, 1)")
    if spacing <= 0:
        raise ValueError("grid spacing must be positive")
    k = data.k
    gx = _grid_axis(extent[0], extent[1], spacing)
    gy = _grid_axis(extent[2], extent[3], spacing)
    Z = np.stack(np.meshgrid(gx, gy), axis=-1).reshape(-1, 2)

    A, _ = probe_operator(data.obs_angles, radius, k, n_directions)
    P, s, _ = np.linalg.svd(A, full_matrices=False)
    filt = _tikhonov_filter(s, alpha_rel)

    # F_z = diag(exp(-ik z.x)) A diag(exp(ik z.y)); both factors are unitary,
    # so |g_z| = |filt * P^H (exp(ik z.x) * b)|.
    xh = data.obs_directions()
    phase = np.exp(1j * k * (xh.T @ Z.T))  # (I, Nz)
    total = np.zeros(Z.shape[0])
    for j in range(data.values.shape[1]):
        c = P.conj().T @ (phase * data.values[:, j : j + 1])
        total += np.linalg.norm(filt[:, None] * c, axis=0)
    return IndicatorMap(gx, gy, total.reshape(gy.size, gx.size))


class EsmLocator(BaseEstimator):
    """Obstacle localization by the extended sampling method.

    Parameters
    ----------
    radius : float
        Radius of the sound-soft probe disc.
    extent : tuple of float
        Sampling rectangle ``(x_min, x_max, y_min, y_max)``.
    spacing : float
        Grid spacing.
    alpha_rel : float
        Tikhonov parameter relative to the largest singular value.
    n_directions : int
        Number of equispaced directions discretizing the density.

    Attributes
    ----------
    indicator_map_ : IndicatorMap
    location_ : ndarray of shape (2,)
    on_boundary_ : bool
        The minimizer lies on the grid edge, so the grid may miss the obstacle.
    """

    def __init__(self, radius=2.0, extent=(-3.0, 3.0, -3.0, 3.0), spacing=0.1, alpha_rel=1e-2, n_directions=64):
        self.radius = radius
        self.extent = extent
        self.spacing = spacing
        self.alpha_rel = alpha_rel
        self.n_directions = n_directions

    def fit(self, data, y=None):
        self.indicator_map_ = locate(
            data,
            radius=self.radius,
            extent=tuple(self.extent),
            spacing=self.spacing,
            alpha_rel=self.alpha_rel,
            n_directions=self.n_directions,
        )
        self.location_ = self.indicator_map_.argmin
        self.on_boundary_ = self.indicator_map_.on_boundary
        if self.on_boundary_:
            warnings.warn("indicator minimum lies on the grid boundary; enlarge the sampling region", stacklevel=2)
        return self

    def predict(self, data=None):
        """The estimated obstacle location (refits if ``data`` is given)."""
        if data is not None:
            self.fit(data)
        check_is_fitted(self, "location_")
        return self.location_
