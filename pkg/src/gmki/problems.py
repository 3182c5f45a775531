"""Bayesian inverse-problem definitions and the regularized misfit.

The regularized misfit is

    phi_r(theta) = 1/2 |Sigma_eta^{-1/2} (y - G(theta))|^2
                 + 1/2 |Sigma_0^{-1/2} (theta - r0)|^2

which equals the single least-squares misfit of the augmented problem
``x = [y; r0]``, ``F(theta) = [G(theta); theta]``,
``Sigma_nu = diag(Sigma_eta, Sigma_0)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.linalg import solve_triangular

from .gaussians import cholesky_spd


class ForwardModel:
    """Deterministic forward map theta -> prediction.

    Subclasses implement :meth:`__call__`; :meth:`evaluate_batch` has a
    default loop and may be overridden with a vectorized version.
    ``parallel_safe`` declares whether concurrent evaluation is allowed.
    """

    parallel_safe: bool = True

    def __call__(self, theta: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def evaluate_batch(self, thetas: np.ndarray) -> np.ndarray:
        return np.stack([np.atleast_1d(self(t)) for t in np.asarray(thetas, dtype=float)])


class CallableForwardModel(ForwardModel):
    """Wraps a plain function (and optionally a batched variant)."""

    def __init__(self, fn: Callable[[np.ndarray], np.ndarray],
                 batch_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                 parallel_safe: bool = True):
        self._fn = fn
        self._batch_fn = batch_fn
        self.parallel_safe = parallel_safe

    def __call__(self, theta):
        return np.atleast_1d(np.asarray(self._fn(np.asarray(theta, dtype=float)), dtype=float))

    def evaluate_batch(self, thetas):
        if self._batch_fn is not None:
            return np.asarray(self._batch_fn(np.asarray(thetas, dtype=float)), dtype=float)
        return super().evaluate_batch(thetas)


class CountingForwardModel(ForwardModel):
    """Forward-model wrapper counting evaluations (batch rows included)."""

    def __init__(self, inner: ForwardModel):
        self.inner = inner
        self.parallel_safe = inner.parallel_safe
        self.count = 0

    def __call__(self, theta):
        self.count += 1
        return self.inner(theta)

    def evaluate_batch(self, thetas):
        self.count += len(thetas)
        return self.inner.evaluate_batch(thetas)


@dataclass
class InverseProblem:
    """Forward map, data, and Gaussian noise/prior covariances."""

    forward: ForwardModel
    y: np.ndarray
    sigma_eta: np.ndarray
    r0: np.ndarray
    sigma_0: np.ndarray
    eta_factor: np.ndarray = field(init=False)
    prior_factor: np.ndarray = field(init=False)

    def __post_init__(self):
        self.y = np.atleast_1d(np.asarray(self.y, dtype=float))
        self.r0 = np.atleast_1d(np.asarray(self.r0, dtype=float))
        self.sigma_eta = np.atleast_2d(np.asarray(self.sigma_eta, dtype=float))
        self.sigma_0 = np.atleast_2d(np.asarray(self.sigma_0, dtype=float))
        self.eta_factor = cholesky_spd(self.sigma_eta)
        self.prior_factor = cholesky_spd(self.sigma_0)

    @property
    def n_theta(self) -> int:
        return self.r0.shape[0]

    @property
    def n_y(self) -> int:
        return self.y.shape[0]


@dataclass
class AugmentedProblem:
    """The stacked form: data ``x = [y; r0]`` against ``F = [G; id]``."""

    x: np.ndarray
    forward: ForwardModel
    sigma_nu: np.ndarray
    nu_factor: np.ndarray
    n_y: int
    n_theta: int

    def f(self, theta: np.ndarray) -> np.ndarray:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        return np.concatenate([self.forward(theta), theta])

    def f_batch(self, thetas: np.ndarray) -> np.ndarray:
        thetas = np.asarray(thetas, dtype=float)
        return np.hstack([self.forward.evaluate_batch(thetas), thetas])

    def misfit(self, f_value: np.ndarray) -> float:
        """1/2 |Sigma_nu^{-1/2} (x - f_value)|^2 for an already-evaluated F."""
        z = solve_triangular(self.nu_factor, self.x - f_value, lower=True)
        return 0.5 * float(z @ z)


def augment(p: InverseProblem) -> AugmentedProblem:
    x = np.concatenate([p.y, p.r0])
    n_y, n_t = p.n_y, p.n_theta
    sigma_nu = np.zeros((n_y + n_t, n_y + n_t))
    sigma_nu[:n_y, :n_y] = p.sigma_eta
    sigma_nu[n_y:, n_y:] = p.sigma_0
    nu_factor = np.zeros_like(sigma_nu)
    nu_factor[:n_y, :n_y] = p.eta_factor
    nu_factor[n_y:, n_y:] = p.prior_factor
    return AugmentedProblem(x=x, forward=p.forward, sigma_nu=sigma_nu,
                            nu_factor=nu_factor, n_y=n_y, n_theta=n_t)


def phi_r(p: InverseProblem, theta: np.ndarray) -> float:
    """Regularized misfit at a single point."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if theta.shape[0] != p.n_theta:
        raise ValueError("theta dimension does not match the problem")
    g = p.forward(theta)
    return phi_r_from_prediction(p, theta, g)


def phi_r_from_prediction(p: InverseProblem, theta: np.ndarray, g_value: np.ndarray) -> float:
    """Misfit reusing an already-available forward evaluation."""
    z_data = solve_triangular(p.eta_factor, p.y - g_value, lower=True)
    z_prior = solve_triangular(p.prior_factor, theta - p.r0, lower=True)
    return 0.5 * float(z_data @ z_data) + 0.5 * float(z_prior @ z_prior)


def phi_r_batch(p: InverseProblem, thetas: np.ndarray) -> np.ndarray:
    """Regularized misfit over a batch (M, n_theta) of points."""
    thetas = np.asarray(thetas, dtype=float)
    g = p.forward.evaluate_batch(thetas)
    z_data = solve_triangular(p.eta_factor, (p.y - g).T, lower=True)
    z_prior = solve_triangular(p.prior_factor, (thetas - p.r0).T, lower=True)
    return 0.5 * np.sum(z_data**2, axis=0) + 0.5 * np.sum(z_prior**2, axis=0)
