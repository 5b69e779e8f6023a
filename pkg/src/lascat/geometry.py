"""Boundary curves: star-shaped log-radius expansions and reference obstacles.

Every curve exposes ``derivatives(theta)`` returning the point and its first
two parameter derivatives, each of shape ``(2,) + theta.shape``, traversed
counter-clockwise so that ``(x2', -x1')`` points outward.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "PriorKind",
    "BoundaryShape",
    "Circle",
    "Kite",
    "Pear",
    "REFERENCE_CURVES",
    "reference_curve",
    "boundary_point",
    "sample_boundary",
    "eval_q",
    "holder_norm",
    "polygon_area",
    "polygon_centroid",
    "hausdorff_distance",
]

SQRT_PI = np.sqrt(np.pi)
SQRT_2PI = np.sqrt(2.0 * np.pi)


class PriorKind(str, Enum):
    """Basis weighting of the log-radius expansion."""

    QA = "qa"
    QB = "qb"
    QC = "qc"


def _basis_weights(kind, N):
    # q = a0/sqrt(2pi) + sum_n (wa_n a_n cos n t + wb_n b_n sin n t) / sqrt(pi)
    n = np.arange(1, N + 1, dtype=float)
    kind = PriorKind(kind)
    if kind is PriorKind.QA:
        return -n**-3, -n**-3
    if kind is PriorKind.QB:
        return -n**-2, n**-2
    return 1.0 / n, 1.0 / n


def eval_q(shape, theta):
    """Log-radius q and its first two derivatives at ``theta``.

    Derivatives are taken term by term from the series for q itself, so
    the three outputs are always mutually consistent.
    """
    theta = np.asarray(theta, dtype=float)
    N = shape.N
    a0, a, b = shape.a[0], shape.a[1:], shape.b
    wa, wb = _basis_weights(shape.prior_kind, N)
    n = np.arange(1, N + 1, dtype=float)
    nt = np.multiply.outer(theta, n)
    c, s = np.cos(nt), np.sin(nt)
    ca, cb = wa * a / SQRT_PI, wb * b / SQRT_PI
    q = a0 / SQRT_2PI + c @ ca + s @ cb
    dq = -s @ (n * ca) + c @ (n * cb)
    ddq = -(c @ (n**2 * ca) + s @ (n**2 * cb))
    return q, dq, ddq


@dataclass(frozen=True)
class BoundaryShape:
    """Star-shaped boundary ``z0 + exp(q(theta)) (cos theta, sin theta)``.

    ``coeffs`` is laid out as ``[a0, a1..aN, b1..bN]``.
    """

    z0: np.ndarray
    coeffs: np.ndarray
    prior_kind: PriorKind = PriorKind.QB

    def __post_init__(self):
        z0 = np.asarray(self.z0, dtype=float).reshape(2)
        coeffs = np.asarray(self.coeffs, dtype=float).ravel()
        if coeffs.size < 3 or coeffs.size % 2 == 0:
            raise ValueError(f"coefficient vector must have length 2N+1 with N >= 1, got {coeffs.size}")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "z0", z0)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "prior_kind", PriorKind(self.prior_kind))

    @property
    def N(self):
        return (self.coeffs.size - 1) // 2

    @property
    def a(self):
        return self.coeffs[: self.N + 1]

    @property
    def b(self):
        return self.coeffs[self.N + 1 :]

    @classmethod
    def initial(cls, z0, N=10, prior_kind=PriorKind.QB):
        """The sampler's starting state: a0 = 1, all other coefficients 0."""
        coeffs = np.zeros(2 * N + 1)
        coeffs[0] = 1.0
        return cls(z0, coeffs, prior_kind)

    def radius(self, theta):
        return np.exp(eval_q(self, theta)[0])

    def derivatives(self, theta):
        theta = np.asarray(theta, dtype=float)
        q, dq, ddq = eval_q(self, theta)
        r = np.exp(q)
        e = np.array([np.cos(theta), np.sin(theta)])
        e_perp = np.array([-np.sin(theta), np.cos(theta)])
        x = self.z0.reshape((2,) + (1,) * theta.ndim) + r * e
        dx = r * (dq * e + e_perp)
        ddx = r * ((ddq + dq**2 - 1.0) * e + 2.0 * dq * e_perp)
        return x, dx, ddx


@dataclass(frozen=True)
class Circle:
    radius: float = 1.0
    center: tuple = (0.0, 0.0)

    def derivatives(self, theta):
        theta = np.asarray(theta, dtype=float)
        c = np.asarray(self.center, dtype=float).reshape((2,) + (1,) * theta.ndim)
        e = np.array([np.cos(theta), np.sin(theta)])
        e_perp = np.array([-np.sin(theta), np.cos(theta)])
        return c + self.radius * e, self.radius * e_perp, -self.radius * e


@dataclass(frozen=True)
class Kite:
    """``(cos t + 0.65 cos 2t - 0.65, 1.5 sin t)``, optionally translated."""

    shift: tuple = (0.0, 0.0)

    def derivatives(self, theta):
        t = np.asarray(theta, dtype=float)
        sx, sy = self.shift
        x = np.array([np.cos(t) + 0.65 * np.cos(2 * t) - 0.65 + sx, 1.5 * np.sin(t) + sy])
        dx = np.array([-np.sin(t) - 1.3 * np.sin(2 * t), 1.5 * np.cos(t)])
        ddx = np.array([-np.cos(t) - 2.6 * np.cos(2 * t), -1.5 * np.sin(t)])
        return x, dx, ddx


@dataclass(frozen=True)
class Pear:
    """``r(t) = (5 + sin 3t) / 6`` in polar form, optionally translated."""

    shift: tuple = (0.0, 0.0)

    def derivatives(self, theta):
        t = np.asarray(theta, dtype=float)
        r = (5.0 + np.sin(3 * t)) / 6.0
        dr = 0.5 * np.cos(3 * t)
        ddr = -1.5 * np.sin(3 * t)
        e = np.array([np.cos(t), np.sin(t)])
        e_perp = np.array([-np.sin(t), np.cos(t)])
        s = np.asarray(self.shift, dtype=float).reshape((2,) + (1,) * t.ndim)
        x = s + r * e
        dx = dr * e + r * e_perp
        ddx = (ddr - r) * e + 2.0 * dr * e_perp
        return x, dx, ddx


REFERENCE_CURVES = ("kite", "pear", "circle")


def reference_curve(name, radius=1.0, shift=(0.0, 0.0)):
    """Look up a reference obstacle by name."""
    name = name.lower()
    if name == "kite":
        return Kite(tuple(shift))
    if name == "pear":
        return Pear(tuple(shift))
    if name == "circle":
        return Circle(float(radius), tuple(shift))
    raise ValueError(f"unknown curve {name!r}; valid curves: {', '.join(REFERENCE_CURVES)}")


def boundary_point(curve, theta):
    """Point, unit tangent, unit outward normal and Jacobian ``|dx/dtheta|``."""
    x, dx, _ = curve.derivatives(theta)
    jac = np.hypot(dx[0], dx[1])
    tangent = dx / jac
    normal = np.array([tangent[1], -tangent[0]])
    return x, tangent, normal, jac


def sample_boundary(curve, n_points=256):
    """``(theta, x, y)`` at ``n_points`` equispaced parameter values."""
    theta = 2.0 * np.pi * np.arange(n_points) / n_points
    x = curve.derivatives(theta)[0]
    return theta, x[0], x[1]


def holder_norm(shape, alpha=1.0, n_grid=512):
    """Grid estimate of ``|q| + |q'| + |q''| + [q'']_alpha`` (sup norms)."""
    theta = 2.0 * np.pi * np.arange(n_grid) / n_grid
    q, dq, ddq = eval_q(shape, theta)
    diff = np.abs(ddq[:, None] - ddq[None, :])
    dist = np.abs(theta[:, None] - theta[None, :])
    np.fill_diagonal(dist, np.inf)
    seminorm = np.max(diff / dist**alpha)
    return np.max(np.abs(q)) + np.max(np.abs(dq)) + np.max(np.abs(ddq)) + seminorm


def polygon_area(x, y):
    """Signed shoelace area of a closed polygon (positive if counter-clockwise)."""
    return 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)


def polygon_centroid(x, y):
    cross = x * np.roll(y, -1) - np.roll(x, -1) * y
    area = 0.5 * np.sum(cross)
    cx = np.sum((x + np.roll(x, -1)) * cross) / (6.0 * area)
    cy = np.sum((y + np.roll(y, -1)) * cross) / (6.0 * area)
    return np.array([cx, cy])


def hausdorff_distance(p, q):
    """Symmetric Hausdorff distance between two point clouds of shape (n, 2)."""
    d = np.hypot(p[:, None, 0] - q[None, :, 0], p[:, None, 1] - q[None, :, 1])
    return max(d.min(axis=1).max(), d.min(axis=0).max())
