"""Bessel and Hankel functions of integer order and positive real argument.

J_n comes from Miller's downward recurrence normalized by
``J_0 + 2 * sum_k J_2k = 1``.  Y_0 and Y_1 come from the Neumann series in
the same J values for moderate arguments and from the Hankel asymptotic
expansion for large ones; higher Y orders follow by upward recurrence,
which is stable for Y.
"""

import math

import numpy as np

__all__ = [
    "DomainError",
    "MAX_ORDER",
    "bessel_j",
    "bessel_y",
    "hankel1",
    "bessel_jp",
    "bessel_yp",
    "jy_table",
    "j0j1y0y1",
]

MAX_ORDER = 200
EULER_GAMMA = 0.57721566490153286061

# above this argument Y_0, Y_1 use the asymptotic expansion
_ASYMPTOTIC_X = 30.0
_RESCALE_AT = 1e200
_RESCALE_BY = 1e-200


class DomainError(ValueError):
    """Argument outside the supported domain (x must be finite and > 0)."""


def _check_args(n, x):
    if isinstance(n, bool) or int(n) != n:
        raise ValueError(f"order must be an integer, got {n!r}")
    n = int(n)
    if n < 0 or n > MAX_ORDER:
        raise ValueError(f"order must lie in [0, {MAX_ORDER}], got {n}")
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)) or np.any(x <= 0):
        raise DomainError("argument must be finite and strictly positive")
    return n, x


def _log10_envelope(m, x):
    # rough log10 of 1/|J_m(x)| for m > x (Zhang & Jin)
    return 0.5 * math.log10(6.28 * m) - m * math.log10(1.36 * x / m)


def _start_order(nmax, xmax):
    m = max(int(xmax) + 2, nmax + 2, 4)
    target = max(22.0, _log10_envelope(max(nmax, 1), xmax) + 17.0 if nmax > xmax else 22.0)
    while _log10_envelope(m, xmax) < target:
        m += 2
    return m + (m % 2)


def _odd_weight(n):
    # coefficient of J_n (n odd) in the Neumann-type series for Y_1
    k = (n + 1) // 2
    if k == 1:
        return -1.0
    return (-1.0) ** k * (1.0 / k + 1.0 / (k - 1))


def _miller(nmax, x):
    """J_0..J_nmax plus the unnormalized Neumann sums, for 1-D ``x``."""
    m = _start_order(nmax, float(x.max()))
    out = np.zeros((nmax + 1, x.size))
    j_next = np.zeros_like(x)
    j = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    s0 = np.zeros_like(x)
    s1 = np.zeros_like(x)
    two_over_x = 2.0 / x
    for n in range(m, 0, -1):
        if n <= nmax:
            out[n] = j
        if n % 2 == 0:
            k = n // 2
            norm += 2.0 * j
            s0 += ((-1.0) ** k / k) * j
        else:
            s1 += _odd_weight(n) * j
        j_prev = n * two_over_x * j - j_next
        j_next, j = j, j_prev
        big = np.abs(j) > _RESCALE_AT
        if big.any():
            j[big] *= _RESCALE_BY
            j_next[big] *= _RESCALE_BY
            norm[big] *= _RESCALE_BY
            s0[big] *= _RESCALE_BY
            s1[big] *= _RESCALE_BY
            if n <= nmax + 1:
                out[n - 1 :, big] *= _RESCALE_BY
    out[0] = j
    norm += j
    out /= norm
    return out, s0 / norm, s1 / norm


def _hankel_asymptotic_01(x):
    """Y_0 and Y_1 from the large-argument Hankel expansion."""
    ys = []
    for nu in (0, 1):
        mu = 4.0 * nu * nu
        p = np.ones_like(x)
        q = np.zeros_like(x)
        term = np.ones_like(x)
        for k in range(1, 40):
            term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
            if k % 2:
                q += term if (k // 2) % 2 == 0 else -term
            else:
                p += -term if (k // 2) % 2 else term
            if np.max(np.abs(term)) < 1e-17:
                break
        chi = x - (0.5 * nu + 0.25) * np.pi
        ys.append(np.sqrt(2.0 / (np.pi * x)) * (p * np.sin(chi) + q * np.cos(chi)))
    return ys[0], ys[1]


def _jy_flat(nmax, x):
    """J and Y for orders 0..nmax on 1-D positive ``x``; Y has >= 2 rows."""
    rows = max(nmax, 1)
    J, s0, s1 = _miller(rows, x)
    log_term = np.log(0.5 * x) + EULER_GAMMA
    y0 = (2.0 / np.pi) * log_term * J[0] - (4.0 / np.pi) * s0
    y1 = (2.0 / np.pi) * log_term * J[1] - (2.0 / np.pi) * J[0] / x + (2.0 / np.pi) * s1
    far = x >= _ASYMPTOTIC_X
    if far.any():
        y0[far], y1[far] = _hankel_asymptotic_01(x[far])
    Y = np.empty_like(J)
    Y[0], Y[1] = y0, y1
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, rows):
            Y[n + 1] = (2.0 * n / x) * Y[n] - Y[n - 1]
    # Y_n -> -inf as x -> 0+; overflow must not surface as NaN
    Y[~np.isfinite(Y)] = -np.inf
    return J[: nmax + 1], Y[: nmax + 1]


def jy_table(nmax, x):
    """Return ``(J, Y)`` with shape ``(nmax + 1,) + x.shape`` for orders 0..nmax."""
    nmax, x = _check_args(nmax, x)
    flat = np.atleast_1d(x).ravel()
    J, Y = _jy_flat(nmax, flat)
    shape = (nmax + 1,) + x.shape
    return J.reshape(shape), Y.reshape(shape)


def j0j1y0y1(x):
    """J_0, J_1, Y_0, Y_1 at once; the hot path of kernel assembly."""
    _, x = _check_args(0, x)
    flat = np.atleast_1d(x).ravel()
    J, Y = _jy_flat(1, flat)
    return tuple(a.reshape(x.shape) for a in (J[0], J[1], Y[0], Y[1]))


def _scalarize(values):
    return values.item() if values.ndim == 0 else values


def bessel_j(n, x):
    """Bessel function of the first kind J_n(x)."""
    n, x = _check_args(n, x)
    J, _ = jy_table(n, x)
    return _scalarize(J[n])


def bessel_y(n, x):
    """Bessel function of the second kind Y_n(x)."""
    n, x = _check_args(n, x)
    _, Y = jy_table(n, x)
    return _scalarize(Y[n])


def hankel1(n, x):
    """Hankel function of the first kind, H^(1)_n(x) = J_n(x) + i Y_n(x)."""
    n, x = _check_args(n, x)
    J, Y = jy_table(n, x)
    return _scalarize(J[n] + 1j * Y[n])


def _derivative(table, n, x):
    if n == 0:
        return -table[1]
    return 0.5 * (table[n - 1] - table[n + 1])


def bessel_jp(n, x):
    """First derivative J_n'(x)."""
    n, x = _check_args(n, x)
    if n == MAX_ORDER:
        J, _ = jy_table(n, x)
        return _scalarize(J[n - 1] - n / x * J[n])
    J, _ = jy_table(n + 1, x)
    return _scalarize(_derivative(J, n, x))


def bessel_yp(n, x):
    """First derivative Y_n'(x)."""
    n, x = _check_args(n, x)
    if n == MAX_ORDER:
        _, Y = jy_table(n, x)
        return _scalarize(Y[n - 1] - n / x * Y[n])
    _, Y = jy_table(n + 1, x)
    return _scalarize(_derivative(Y, n, x))
