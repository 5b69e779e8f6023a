"""Sound-soft scattering by a smooth closed curve: combined-field Nyström solver.

The scattered field is the combined potential ``(dPhi/dnu(y) - i*xi*Phi) phi``
with ``Phi(x, y) = (i/4) H0(k|x - y|)``, and the density solves
``(I + K - i xi S) phi = -2 u_inc`` on the boundary.  Kernels are split
into a part weighted by ``ln(4 sin^2((t - tau)/2))``, integrated with
trigonometric product weights, and a smooth remainder integrated with the
trapezoidal rule.  Convergence is exponential on analytic curves.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .specfun import EULER_GAMMA, j0j1y0y1

__all__ = [
    "ForwardConfig",
    "Discretization",
    "DensitySolution",
    "SingularSystemError",
    "log_quadrature_weights",
    "discretize",
    "assemble",
    "solve_density",
    "solve_densities",
    "far_field",
    "far_field_matrix",
    "far_field_at",
    "unit_vectors",
]


class SingularSystemError(RuntimeError):
    """The Nyström matrix is numerically singular (a discretization bug)."""


@dataclass(frozen=True)
class ForwardConfig:
    """Wavenumber, coupling parameter (``None`` means ``xi = k``) and half node count."""

    k: float = 1.0
    coupling: float | None = None
    n_quad: int = 32

    def __post_init__(self):
        if not np.isfinite(self.k) or self.k <= 0:
            raise ValueError(f"wavenumber must be positive, got {self.k}")
        if self.coupling is not None and self.coupling == 0:
            raise ValueError("coupling parameter must be nonzero")
        if int(self.n_quad) != self.n_quad or self.n_quad < 8:
            raise ValueError(f"n_quad must be an integer >= 8, got {self.n_quad}")

    @property
    def xi(self):
        return self.k if self.coupling is None else float(self.coupling)


@dataclass(frozen=True)
class Discretization:
    """Boundary sampled at ``2 n`` equispaced parameter nodes."""

    t: np.ndarray
    x: np.ndarray  # (2, 2n)
    dx: np.ndarray
    ddx: np.ndarray

    @property
    def speed(self):
        return np.hypot(self.dx[0], self.dx[1])

    @property
    def normal(self):
        # unit outward normal for counter-clockwise curves
        return np.array([self.dx[1], -self.dx[0]]) / self.speed


@dataclass(frozen=True)
class DensitySolution:
    """Density values at the nodes; ``phi`` has one column per incident direction."""

    phi: np.ndarray
    disc: Discretization
    config: ForwardConfig
    directions: np.ndarray  # (2, J)
    residual: float = float("nan")


def log_quadrature_weights(n):
    """Weights ``R(t_i - t_j)`` for ``int ln(4 sin^2((t - tau)/2)) f(tau) dtau``.

    Returned as a vector indexed by ``(i - j) mod 2n``.
    """
    d = np.arange(2 * n)
    m = np.arange(1, n)
    s = np.cos(np.outer(d, m) * np.pi / n) @ (1.0 / m)
    return -(2.0 * np.pi / n) * s - (np.pi / n**2) * np.cos(d * np.pi)


def discretize(curve, n_quad):
    t = np.pi * np.arange(2 * n_quad) / n_quad
    x, dx, ddx = curve.derivatives(t)
    return Discretization(t, np.asarray(x), np.asarray(dx), np.asarray(ddx))


def assemble(disc, config):
    """Dense Nyström matrix of ``I + K - i xi S`` at the nodes of ``disc``."""
    k, xi = config.k, config.xi
    n2 = disc.t.size
    n = n2 // 2
    idx = np.arange(n2)
    lag = (idx[:, None] - idx[None, :]) % n2
    R = log_quadrature_weights(n)[lag]

    diff = disc.x[:, :, None] - disc.x[:, None, :]
    r = np.hypot(diff[0], diff[1])
    off = ~np.eye(n2, dtype=bool)
    kr = k * r[off]
    J0, J1, Y0, Y1 = j0j1y0y1(kr)

    # unnormalized normal (x2', -x1') at the source node tau_j
    nu = np.array([disc.dx[1], -disc.dx[0]])
    speed = disc.speed
    nu_dot = (nu[0][None, :] * diff[0] + nu[1][None, :] * diff[1])[off]
    speed_j = np.broadcast_to(speed[None, :], (n2, n2))[off]

    dt = disc.t[:, None] - disc.t[None, :]
    logw = np.log(4.0 * np.sin(0.5 * dt[off]) ** 2)

    L = np.empty((n2, n2), dtype=complex)
    L1 = np.zeros((n2, n2))
    M = np.empty((n2, n2), dtype=complex)
    M1 = np.empty((n2, n2))

    L[off] = 0.5j * k * nu_dot * (J1 + 1j * Y1) / r[off]
    L1[off] = -(k / (2.0 * np.pi)) * nu_dot * J1 / r[off]
    M[off] = 0.5j * (J0 + 1j * Y0) * speed_j
    M1[off] = -(1.0 / (2.0 * np.pi)) * J0 * speed_j

    L2 = np.empty((n2, n2), dtype=complex)
    M2 = np.empty((n2, n2), dtype=complex)
    L2[off] = L[off] - L1[off] * logw
    M2[off] = M[off] - M1[off] * logw

    diag = np.diag_indices(n2)
    nu_dot_dd = disc.dx[1] * disc.ddx[0] - disc.dx[0] * disc.ddx[1]
    L2[diag] = nu_dot_dd / (2.0 * np.pi * speed**2)
    M1[diag] = -speed / (2.0 * np.pi)
    M2[diag] = (0.5j - EULER_GAMMA / np.pi - np.log(0.5 * k * speed) / np.pi) * speed

    A1 = L1 - 1j * xi * M1
    A2 = L2 - 1j * xi * M2
    return np.eye(n2) + R * A1 + (np.pi / n) * A2


def _unit_vectors(d):
    d = np.asarray(d, dtype=float)
    if d.ndim == 1:
        d = d.reshape(2, 1)
    if d.ndim != 2 or d.shape[0] != 2:
        raise ValueError(f"direction vectors must have shape (2,) or (2, J), got {d.shape}")
    if not np.allclose(np.hypot(d[0], d[1]), 1.0, atol=1e-12):
        raise ValueError("direction vectors must have unit length")
    return d


def unit_vectors(angles):
    """``(2, n)`` unit vectors ``(cos phi, sin phi)``."""
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    return np.array([np.cos(angles), np.sin(angles)])


def _solve(curve, config, d):
    disc = discretize(curve, config.n_quad)
    A = assemble(disc, config)
    rhs = -2.0 * np.exp(1j * config.k * (disc.x.T @ d))
    try:
        lu, piv = scipy.linalg.lu_factor(A, check_finite=True)
    except (ValueError, np.linalg.LinAlgError) as exc:
        raise SingularSystemError(str(exc)) from exc
    diag = np.abs(np.diag(lu))
    if diag.min() < 1e-14 * diag.max():
        raise SingularSystemError("Nyström matrix is numerically singular")
    phi = scipy.linalg.lu_solve((lu, piv), rhs)
    return DensitySolution(phi, disc, config, d, float(np.max(np.abs(A @ phi - rhs))))


def solve_densities(curve, config, inc_angles):
    """Densities for several incident angles, sharing one LU factorization."""
    return _solve(curve, config, unit_vectors(inc_angles))


def solve_density(curve, config, d):
    """Density for the unit incident direction vector ``d``."""
    return _solve(curve, config, _unit_vectors(d))


def far_field(density, xhat):
    """Far-field pattern at unit observation vectors ``xhat`` ((2,) or (2, I)).

    Result has shape ``(I, J)``: observation by incident direction.
    """
    xh = _unit_vectors(xhat)
    disc, cfg = density.disc, density.config
    k, xi = cfg.k, cfg.xi
    n = disc.t.size // 2
    nu = disc.normal
    weight = (np.exp(-0.25j * np.pi) / np.sqrt(8.0 * np.pi * k)) * (np.pi / n)
    P = (k * (xh.T @ nu) + xi) * np.exp(-1j * k * (xh.T @ disc.x)) * disc.speed[None, :]
    return weight * (P @ density.phi)


def far_field_matrix(curve, config, obs_angles, inc_angles):
    """Far field for every (observation, incidence) pair: shape ``(I, J)``."""
    sol = solve_densities(curve, config, inc_angles)
    return far_field(sol, unit_vectors(obs_angles))


def far_field_at(curve, config, apertures):
    """Far field over an ``(obs, inc)`` pair of aperture specs, as FarFieldData."""
    from .dataset import FarFieldData

    obs, inc = apertures
    obs_angles, inc_angles = obs.angles(), inc.angles()
    values = far_field_matrix(curve, config, obs_angles, inc_angles)
    return FarFieldData(
        k=config.k,
        obs_angles=obs_angles,
        inc_angles=inc_angles,
        values=values,
        provenance=f"nystrom n_quad={config.n_quad} xi={config.xi} curve={curve!r}",
    )
