"""Metropolis-Hastings sampling of the boundary-coefficient posterior.

The posterior density is ``exp(-Phi(c) - P(c))`` with ``Phi`` the
data misfit and ``P(c) = |c|^2 / 2`` the standard-normal prior.  Proposals
are the preconditioned Crank-Nicolson kernel ``sqrt(1 - 2 beta) c + sqrt(2 beta) xi``
or the plain random walk ``c + sqrt(2 beta) xi``.
"""

import csv
import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .esm import EsmLocator
from .forward import ForwardConfig, SingularSystemError, far_field, far_field_matrix, solve_densities, unit_vectors
from .geometry import BoundaryShape, PriorKind, sample_boundary
from .prior import PriorSpec, neg_log_prior
from .validation import check_farfield, check_location, check_random_state_seed

__all__ = [
    "Kernel",
    "AcceptanceMode",
    "McmcConfig",
    "ChainState",
    "ChainResult",
    "propose",
    "accept_ratio",
    "run_chain",
    "neg_log_likelihood",
    "resolve_sigma",
    "BayesianShapeReconstructor",
]

logger = logging.getLogger(__name__)


class Kernel(str, Enum):
    F1_PCN = "f1"
    F2_RW = "f2"


class AcceptanceMode(str, Enum):
    """``PAPER_RATIO`` uses the full posterior ratio; ``PCN_LIKELIHOOD`` the likelihood ratio only."""

    PAPER_RATIO = "paper"
    PCN_LIKELIHOOD = "pcn"


@dataclass(frozen=True)
class McmcConfig:
    """Sampler settings.

    ``cm_window`` larger than ``n_iter`` is clamped: the conditional mean is
    then taken over the whole chain.
    """

    beta: float = 1e-4
    n_iter: int = 10_000
    kernel: Kernel = Kernel.F1_PCN
    acceptance: AcceptanceMode = AcceptanceMode.PCN_LIKELIHOOD
    cm_window: int = 1000
    seed: int | None = None
    sigma: float | None = None
    r_max: float = 10.0

    def __post_init__(self):
        # the endpoints are degenerate but well defined: beta = 0 never moves,
        # beta = 0.5 makes F1 an independence sampler
        if not 0.0 <= self.beta <= 0.5:
            raise ValueError(f"beta must lie in [0, 0.5], got {self.beta}")
        if int(self.n_iter) != self.n_iter or self.n_iter < 1:
            raise ValueError(f"n_iter must be a positive integer, got {self.n_iter}")
        if int(self.cm_window) != self.cm_window or self.cm_window < 1:
            raise ValueError(f"cm_window must be a positive integer, got {self.cm_window}")
        if self.sigma is not None and not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not self.r_max > 0:
            raise ValueError("r_max must be positive")
        check_random_state_seed(self.seed)
        object.__setattr__(self, "kernel", Kernel(self.kernel))
        object.__setattr__(self, "acceptance", AcceptanceMode(self.acceptance))
        object.__setattr__(self, "n_iter", int(self.n_iter))
        object.__setattr__(self, "cm_window", int(self.cm_window))

    @property
    def window(self):
        return min(self.cm_window, self.n_iter)


@dataclass(frozen=True)
class ChainState:
    coeffs: np.ndarray
    neg_log_likelihood: float
    neg_log_prior: float

    @classmethod
    def from_coeffs(cls, coeffs, nll_fn):
        coeffs = np.array(coeffs, dtype=float)
        return cls(coeffs, float(nll_fn(coeffs)), neg_log_prior(coeffs))

    def is_coherent(self, nll_fn, tol=1e-12):
        """Cached values agree with a fresh evaluation."""
        fresh = float(nll_fn(self.coeffs))
        if math.isinf(fresh) or math.isinf(self.neg_log_likelihood):
            ok_l = fresh == self.neg_log_likelihood
        else:
            ok_l = abs(fresh - self.neg_log_likelihood) <= tol * max(1.0, abs(fresh))
        ok_p = abs(neg_log_prior(self.coeffs) - self.neg_log_prior) <= tol * max(1.0, self.neg_log_prior)
        return ok_l and ok_p


@dataclass(frozen=True)
class ChainResult:
    samples: np.ndarray  # (window, 2N+1)
    acceptance_rate: float
    n_accepted: int
    a0_trace: np.ndarray
    nll_trace: np.ndarray
    final_state: ChainState
    config: McmcConfig
    extra: dict = field(default_factory=dict)

    @property
    def cm_coeffs(self):
        return self.samples.mean(axis=0)


def propose(coeffs, config, rng):
    """One proposal from the configured kernel, with a fresh standard-normal ``xi``."""
    xi = rng.standard_normal(np.shape(coeffs))
    step = math.sqrt(2.0 * config.beta) * xi
    if config.kernel is Kernel.F1_PCN:
        return math.sqrt(1.0 - 2.0 * config.beta) * np.asarray(coeffs) + step
    return np.asarray(coeffs) + step


def accept_ratio(current, proposed, mode):
    """Metropolis acceptance probability in ``[0, 1]``."""
    mode = AcceptanceMode(mode)
    if math.isinf(proposed.neg_log_likelihood):
        return 0.0
    log_r = current.neg_log_likelihood - proposed.neg_log_likelihood
    if mode is AcceptanceMode.PAPER_RATIO:
        log_r += current.neg_log_prior - proposed.neg_log_prior
    if math.isnan(log_r):
        return 0.0
    return 1.0 if log_r >= 0 else math.exp(log_r)


def run_chain(nll_fn, initial, config, trace_path=None):
    """Run ``config.n_iter`` Metropolis-Hastings steps from ``initial``.

    Parameters
    ----------
    nll_fn : callable
        Maps a coefficient vector to the negative log-likelihood (may be ``inf``).
    initial : array_like
        Starting coefficients.
    config : McmcConfig
    trace_path : path, optional
        If given, every iteration is streamed to this CSV file.
    """
    rng = np.random.default_rng(config.seed)
    state = ChainState.from_coeffs(initial, nll_fn)
    if math.isinf(state.neg_log_likelihood):
        raise ValueError("initial state has zero likelihood")
    K, W = config.n_iter, config.window
    dim = state.coeffs.size
    samples = np.empty((W, dim))
    a0 = np.empty(K)
    nll = np.empty(K)
    accepted = 0

    fh = open(trace_path, "w", newline="") if trace_path is not None else None
    try:
        writer = None
        if fh is not None:
            writer = csv.writer(fh)
            writer.writerow(["iteration", "a0", "neg_log_likelihood", "accepted"])
        for it in range(K):
            cand = propose(state.coeffs, config, rng)
            prop = ChainState(cand, float(nll_fn(cand)), neg_log_prior(cand))
            ok = rng.random() < accept_ratio(state, prop, config.acceptance)
            if ok:
                state = prop
                accepted += 1
            a0[it] = state.coeffs[0]
            nll[it] = state.neg_log_likelihood
            if it >= K - W:
                samples[it - (K - W)] = state.coeffs
            if writer is not None:
                writer.writerow([it + 1, repr(float(a0[it])), repr(float(nll[it])), int(ok)])
    finally:
        if fh is not None:
            fh.close()
    return ChainResult(samples, accepted / K, accepted, a0, nll, state, config)


def resolve_sigma(data, sigma=None, noise_level=0.1):
    """Explicit sigma, else the level recorded with the data, else ``noise_level * max|y|``."""
    if sigma is not None:
        return float(sigma)
    if data.noise_sigma > 0:
        return data.noise_sigma
    return float(noise_level * np.max(np.abs(data.values)))


def neg_log_likelihood(coeffs, z0, data, sigma, prior_kind=PriorKind.QB, forward_config=None, r_max=10.0):
    """``sum |y - F(coeffs)|^2 / (2 sigma^2)``, or ``inf`` for rejected shapes."""
    shape = BoundaryShape(z0, coeffs, prior_kind)
    cfg = forward_config or ForwardConfig(k=data.k)
    if cfg.k != data.k:
        raise ValueError(f"forward wavenumber {cfg.k} differs from data wavenumber {data.k}")
    theta = 2.0 * np.pi * np.arange(256) / 256
    if np.max(shape.radius(theta)) >= r_max:
        return math.inf
    try:
        with np.errstate(all="raise"):
            F = far_field_matrix(shape, cfg, data.obs_angles, data.inc_angles)
    except (SingularSystemError, np.linalg.LinAlgError, FloatingPointError) as exc:
        logger.warning("forward solve failed, rejecting proposal: %s", exc)
        return math.inf
    if not np.all(np.isfinite(F)):
        logger.warning("forward solve produced non-finite far field, rejecting proposal")
        return math.inf
    return float(np.sum(np.abs(data.values - F) ** 2) / (2.0 * sigma**2))


class BayesianShapeReconstructor(BaseEstimator):
    """Posterior conditional-mean boundary from limited-aperture far-field data.

    Parameters
    ----------
    prior : {'qa', 'qb', 'qc'}
        Log-radius parametrization.
    n_terms : int
        Truncation N of the expansion (2N+1 coefficients).
    beta : float
        Proposal step parameter.
    n_iter : int
        Chain length.
    kernel : {'f1', 'f2'}
        Crank-Nicolson or random-walk proposal.
    acceptance : {'pcn', 'paper'}
        Likelihood-only ratio or full posterior ratio.
    cm_window : int
        Number of final states averaged into the conditional mean.
    noise_level : float
        Relative noise used for sigma when neither ``sigma`` nor the data supply one.
    sigma : float, optional
        Absolute noise scale.
    r_max : float
        Shapes reaching this radius are rejected.
    n_quad : int
        Half node count of the forward solver used during inversion.
    coupling : float, optional
        Combined-field coupling; defaults to the wavenumber.
    location : array_like of shape (2,), optional
        Fixed star centre. If omitted, it is estimated with :class:`EsmLocator`.
    random_state : int, optional
    trace_path : path, optional
        Stream the full chain trace to this CSV file.

    Attributes
    ----------
    location_ : ndarray of shape (2,)
    sigma_ : float
    result_ : ChainResult
    coefficients_ : ndarray
        Conditional-mean coefficients.
    shape_ : BoundaryShape
    acceptance_rate_ : float
    """

    def __init__(
        self,
        prior="qb",
        n_terms=10,
        beta=1e-4,
        n_iter=10_000,
        kernel="f1",
        acceptance="pcn",
        cm_window=1000,
        noise_level=0.1,
        sigma=None,
        r_max=10.0,
        n_quad=32,
        coupling=None,
        location=None,
        random_state=None,
        trace_path=None,
    ):
        self.prior = prior
        self.n_terms = n_terms
        self.beta = beta
        self.n_iter = n_iter
        self.kernel = kernel
        self.acceptance = acceptance
        self.cm_window = cm_window
        self.noise_level = noise_level
        self.sigma = sigma
        self.r_max = r_max
        self.n_quad = n_quad
        self.coupling = coupling
        self.location = location
        self.random_state = random_state
        self.trace_path = trace_path

    def _config(self, sigma):
        return McmcConfig(
            beta=self.beta,
            n_iter=self.n_iter,
            kernel=self.kernel,
            acceptance=self.acceptance,
            cm_window=self.cm_window,
            seed=check_random_state_seed(self.random_state),
            sigma=sigma,
            r_max=self.r_max,
        )

    def fit(self, data, y=None):
        data = check_farfield(data)
        spec = PriorSpec(self.prior, self.n_terms)
        if self.location is None:
            z0 = EsmLocator().fit(data).location_
        else:
            z0 = check_location(self.location)
        sigma = resolve_sigma(data, self.sigma, self.noise_level)
        config = self._config(sigma)
        fwd = ForwardConfig(k=data.k, coupling=self.coupling, n_quad=self.n_quad)

        def nll(c):
            return neg_log_likelihood(c, z0, data, sigma, spec.kind, fwd, self.r_max)

        initial = BoundaryShape.initial(z0, spec.N, spec.kind).coeffs
        self.location_ = np.asarray(z0, dtype=float)
        self.sigma_ = sigma
        self.forward_config_ = fwd
        self.result_ = run_chain(nll, initial, config, self.trace_path)
        self.coefficients_ = self.result_.cm_coeffs
        self.shape_ = BoundaryShape(z0, self.coefficients_, spec.kind)
        self.acceptance_rate_ = self.result_.acceptance_rate
        return self

    def predict(self, X):
        """Far field of the CM boundary at ``(obs_angle, inc_angle)`` pairs, shape (n, 2)."""
        check_is_fitted(self, "shape_")
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.ndim != 2 or X.shape[1] != 2:
            raise ValueError(f"X must have shape (n, 2) of (observation, incidence) angles, got {X.shape}")
        inc, inverse = np.unique(X[:, 1], return_inverse=True)
        sol = solve_densities(self.shape_, self.forward_config_, inc)
        F = far_field(sol, unit_vectors(X[:, 0]))
        return F[np.arange(X.shape[0]), inverse]

    def boundary(self, n_points=256):
        """``(theta, x, y)`` of the CM boundary."""
        check_is_fitted(self, "shape_")
        return sample_boundary(self.shape_, n_points)
