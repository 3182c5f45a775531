"""Dense Gaussian and Gaussian-mixture primitives.

Covariances are carried together with a cached lower-Cholesky factor; all
densities and quadratic forms go through triangular solves against that
factor, never through explicit inverses.  Mixture weights live in the log
domain at all times and are floored at ``LOG_WEIGHT_FLOOR`` whenever they
are normalized.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import logsumexp

from .errors import DegenerateWeightsError, FactorizationError

WEIGHT_FLOOR = 1e-10
LOG_WEIGHT_FLOOR = np.log(WEIGHT_FLOOR)

_SYM_TOL = 1e-12


def cholesky_spd(cov: np.ndarray) -> np.ndarray:
    """Lower-Cholesky factor of an SPD matrix.

    On failure, retries once after symmetrization plus a jitter of
    ``1e-12 * trace(cov) / n`` on the diagonal; a second failure raises
    :class:`FactorizationError` so that genuine degeneracy is not masked.
    """
    cov = np.asarray(cov, dtype=float)
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        pass
    n = cov.shape[0]
    jitter = 1e-12 * np.trace(cov) / n
    fixed = 0.5 * (cov + cov.T) + jitter * np.eye(n)
    try:
        return np.linalg.cholesky(fixed)
    except np.linalg.LinAlgError as exc:
        raise FactorizationError("matrix is not positive definite (after jitter retry)") from exc


@dataclass(frozen=True)
class Gaussian:
    """A dense Gaussian with cached lower-Cholesky factor of its covariance."""

    mean: np.ndarray
    cov: np.ndarray
    factor: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        cov = np.atleast_2d(np.asarray(self.cov, dtype=float))
        scale = np.maximum(1.0, np.abs(cov))
        if not np.all(np.abs(cov - cov.T) <= _SYM_TOL * scale):
            raise FactorizationError("covariance is not symmetric")
        factor = self.factor
        if factor is None:
            factor = cholesky_spd(cov)
        else:
            factor = np.asarray(factor, dtype=float)
        # factors are lower-Cholesky by default, but any square root with
        # factor @ factor.T = cov is accepted (affine images of factors)
        lower = bool(np.all(factor == np.tril(factor)))
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "factor", factor)
        object.__setattr__(self, "_lower", lower)

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    @property
    def log_det_cov(self) -> float:
        if self._lower:
            return 2.0 * float(np.sum(np.log(np.diag(self.factor))))
        return 2.0 * float(np.linalg.slogdet(self.factor)[1])

    def _solve_factor(self, rhs: np.ndarray) -> np.ndarray:
        if self._lower:
            return solve_triangular(self.factor, rhs, lower=True)
        return np.linalg.solve(self.factor, rhs)

    def precision(self) -> np.ndarray:
        """Inverse covariance, via solves against the factor."""
        half = self._solve_factor(np.eye(self.dim))
        return half.T @ half


def gaussian_logpdf(g: Gaussian, theta: np.ndarray) -> np.ndarray:
    """Log-density of ``g`` at ``theta``; ``theta`` may be batched (..., dim)."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape[-1] != g.dim:
        raise ValueError(f"dimension mismatch: theta has {theta.shape[-1]}, Gaussian has {g.dim}")
    dev = theta - g.mean
    z = g._solve_factor(dev.reshape(-1, g.dim).T)
    quad = np.sum(z * z, axis=0).reshape(theta.shape[:-1])
    out = -0.5 * g.dim * np.log(2.0 * np.pi) - 0.5 * g.log_det_cov - 0.5 * quad
    return out if out.ndim else float(out)


def sample_with_factor(mean: np.ndarray, factor: np.ndarray, draws: np.ndarray) -> np.ndarray:
    """Map standard-normal draws (J, dim) through ``mean + factor @ draw``."""
    mean = np.asarray(mean, dtype=float)
    draws = np.asarray(draws, dtype=float)
    return mean + draws @ np.asarray(factor, dtype=float).T


def normalize_log_weights(log_weights: np.ndarray) -> np.ndarray:
    """Normalize and floor at ``LOG_WEIGHT_FLOOR``.

    Floored entries are pinned exactly at the floor and the remaining mass is
    redistributed over the others, so the result both sums to one and respects
    the floor.
    """
    lw = np.asarray(log_weights, dtype=float)
    if not np.any(np.isfinite(lw)):
        raise DegenerateWeightsError("all log-weights are -inf")
    lw = lw - logsumexp(lw)
    floored = lw < LOG_WEIGHT_FLOOR
    if not np.any(floored):
        return lw
    out = np.full_like(lw, LOG_WEIGHT_FLOOR)
    free = ~floored
    remaining = np.log1p(-WEIGHT_FLOOR * np.count_nonzero(floored))
    out[free] = lw[free] - logsumexp(lw[free]) + remaining
    return out


@dataclass(frozen=True)
class GaussianMixture:
    """K weighted Gaussians sharing one dimension, weights in the log domain."""

    components: tuple
    log_weights: np.ndarray

    def __post_init__(self):
        components = tuple(self.components)
        if not components:
            raise ValueError("mixture needs at least one component")
        dim = components[0].dim
        if any(c.dim != dim for c in components):
            raise ValueError("mixture components must share one dimension")
        lw = np.asarray(self.log_weights, dtype=float)
        if lw.shape != (len(components),):
            raise ValueError("log_weights length must match component count")
        object.__setattr__(self, "components", components)
        object.__setattr__(self, "log_weights", lw)

    @classmethod
    def from_weights(cls, components, weights) -> "GaussianMixture":
        return cls(tuple(components), normalize_log_weights(np.log(np.asarray(weights, dtype=float))))

    @property
    def n_components(self) -> int:
        return len(self.components)

    @property
    def dim(self) -> int:
        return self.components[0].dim

    @property
    def weights(self) -> np.ndarray:
        return np.exp(self.log_weights)

    @property
    def means(self) -> np.ndarray:
        return np.stack([c.mean for c in self.components])

    def normalized(self) -> "GaussianMixture":
        return GaussianMixture(self.components, normalize_log_weights(self.log_weights))


def mixture_logpdf(mix: GaussianMixture, theta: np.ndarray) -> np.ndarray:
    """Log-density of the mixture at ``theta`` (batched), via logsumexp."""
    terms = np.stack(
        [lw + gaussian_logpdf(c, theta) for c, lw in zip(mix.components, mix.log_weights)],
        axis=0,
    )
    out = logsumexp(terms, axis=0)
    return out if np.ndim(out) else float(out)


def mixture_entropy_mc(mix: GaussianMixture, n_samples: int, seed: int) -> tuple[float, float]:
    """Stratified Monte Carlo estimate of the differential entropy.

    Allocates ``round(n_samples * w_k)`` draws to component k and returns
    ``(estimate, standard_error)``.
    """
    if n_samples < 100:
        raise ValueError("n_samples must be >= 100")
    rng = np.random.default_rng(seed)
    w = mix.weights
    estimate = 0.0
    var_sum = 0.0
    for k, comp in enumerate(mix.components):
        n_k = int(round(n_samples * w[k]))
        if n_k < 2:
            continue
        draws = rng.standard_normal((n_k, mix.dim))
        samples = sample_with_factor(comp.mean, comp.factor, draws)
        logp = mixture_logpdf(mix, samples)
        estimate += w[k] * float(np.mean(-logp))
        var_sum += w[k] ** 2 * float(np.var(logp, ddof=1)) / n_k
    return estimate, float(np.sqrt(var_sum))
