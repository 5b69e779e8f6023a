"""Self-verification suite run by ``lascat verify``.

Each check compares the solvers against an independent oracle and reports
the measured error next to its tolerance.
"""

from dataclasses import asdict, dataclass, field

import numpy as np

from .esm import disc_far_field
from .forward import ForwardConfig, far_field_matrix
from .geometry import Circle, Kite, Pear
from .specfun import bessel_j, bessel_y

__all__ = ["CheckResult", "run_checks", "CHECKS"]


@dataclass
class CheckResult:
    name: str
    passed: bool
    error: float
    tolerance: float
    details: dict = field(default_factory=dict)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: error={self.error:.3e} tol={self.tolerance:.1e}"

    def to_dict(self):
        return asdict(self)


def _obs(n=64):
    return 2.0 * np.pi * np.arange(n) / n


def check_disc_series(tol=1e-8):
    """Unit circle far field against its Bessel series."""
    cfg = ForwardConfig(k=1.0, n_quad=32)
    phi = _obs()
    num = far_field_matrix(Circle(1.0), cfg, phi, [0.0])[:, 0]
    ref = disc_far_field(1.0, 1.0, phi)
    err = np.linalg.norm(num - ref) / np.linalg.norm(ref)
    return CheckResult("disc_series", bool(err < tol), float(err), tol)


def check_translation(tol=1e-6, shift=(0.3, -0.2)):
    """A shifted pear picks up the phase ``exp(ik z.(d - x))``."""
    k = 1.0
    cfg = ForwardConfig(k=k, n_quad=32)
    phi = _obs()
    inc = np.array([0.0, 1.0])
    base = far_field_matrix(Pear(), cfg, phi, inc)
    moved = far_field_matrix(Pear(shift), cfg, phi, inc)
    z = np.asarray(shift)
    xh = np.array([np.cos(phi), np.sin(phi)])
    d = np.array([np.cos(inc), np.sin(inc)])
    phase = np.exp(1j * k * ((z @ d)[None, :] - (z @ xh)[:, None]))
    err = np.max(np.abs(moved - phase * base)) / np.max(np.abs(base))
    return CheckResult("translation", bool(err < tol), float(err), tol)


def check_reciprocity(tol=1e-6, n_pairs=16, seed=12345):
    """``u(x, d) = u(-d, -x)`` on the kite."""
    rng = np.random.default_rng(seed)
    a, b = rng.uniform(0, 2 * np.pi, (2, n_pairs))
    cfg = ForwardConfig(k=1.0, n_quad=32)
    F = far_field_matrix(Kite(), cfg, np.concatenate([a, b + np.pi]), np.concatenate([b, a + np.pi]))
    n = n_pairs
    lhs = F[np.arange(n), np.arange(n)]
    rhs = F[n + np.arange(n), n + np.arange(n)]
    err = np.max(np.abs(lhs - rhs) / np.abs(lhs))
    return CheckResult("reciprocity", bool(err < tol), float(err), tol)


def check_wronskian(tol=1e-10):
    """``J_{n+1} Y_n - J_n Y_{n+1} = 2 / (pi x)``."""
    x = np.geomspace(0.05, 60.0, 200)
    worst = 0.0
    for n in range(0, 30):
        w = bessel_j(n + 1, x) * bessel_y(n, x) - bessel_j(n, x) * bessel_y(n + 1, x)
        ok = np.isfinite(w)
        rel = np.abs(w[ok] * np.pi * x[ok] / 2.0 - 1.0)
        worst = max(worst, float(rel.max()))
    return CheckResult("wronskian", bool(worst < tol), worst, tol)


def check_convergence(tol=1e-8, levels=(8, 16, 32), reference=64):
    """Self-convergence of the kite far field; reports successive error ratios."""
    phi = _obs()
    ref = far_field_matrix(Kite(), ForwardConfig(n_quad=reference), phi, [0.0])
    errs = []
    for n in levels:
        F = far_field_matrix(Kite(), ForwardConfig(n_quad=n), phi, [0.0])
        errs.append(float(np.linalg.norm(F - ref) / np.linalg.norm(ref)))
    ratios = [errs[i] / max(errs[i + 1], 1e-300) for i in range(len(errs) - 1)]
    # exponential convergence: the last level is accurate and each doubling gains
    # far more than the fixed factor an algebraic rate would give
    passed = errs[-1] < tol and min(ratios) > 16.0
    return CheckResult(
        "spectral_convergence",
        bool(passed),
        errs[-1],
        tol,
        {"n_quad": list(levels), "errors": errs, "ratios": ratios},
    )


CHECKS = {
    "disc_series": check_disc_series,
    "translation": check_translation,
    "reciprocity": check_reciprocity,
    "wronskian": check_wronskian,
    "spectral_convergence": check_convergence,
}


def run_checks(names=None):
    names = list(CHECKS) if names is None else names
    return [CHECKS[n]() for n in names]

