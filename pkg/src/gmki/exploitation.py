"""The exploitation half-step: sigma-point statistics and Kalman update.

A deterministic 2*dim + 1 sigma-point rule with spread weight
``a = max(1/8, 1/(2*dim))`` estimates the first two moments of the
augmented forward map; each component is then conditioned on the stacked
data with inflated noise ``Sigma_nu / dt``, which multiplies the component
by the posterior density to the power dt (exactly so for linear maps).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import ExploitationDegeneracyError, FactorizationError
from .gaussians import Gaussian


def sigma_weight(dim: int) -> float:
    return max(1.0 / 8.0, 1.0 / (2.0 * dim))


@dataclass(frozen=True)
class SigmaPointSet:
    points: np.ndarray  # (2*dim + 1, dim); row 0 is the mean
    a_weight: float

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class UnscentedMoments:
    x_hat: np.ndarray
    c_theta_x: np.ndarray
    c_xx: np.ndarray


def sigma_points(mean: np.ndarray, cov_factor: np.ndarray) -> SigmaPointSet:
    """Mean plus reflected pairs along the columns of the Cholesky factor."""
    mean = np.asarray(mean, dtype=float)
    dim = mean.shape[0]
    a = sigma_weight(dim)
    scale = 1.0 / np.sqrt(2.0 * a)
    offsets = scale * np.asarray(cov_factor, dtype=float).T  # row j = scale * L[:, j]
    points = np.vstack([mean[None, :], mean + offsets, mean - offsets])
    return SigmaPointSet(points=points, a_weight=a)


def sigma_point_expectation(sp: SigmaPointSet, values: np.ndarray) -> np.ndarray:
    """Quadrature mean  g(p0) + a * sum_j (g(pj) - g(p0))  over the spread points.

    Exact for linear integrands; used by the gradient-flow comparator for
    Gaussian expectations of scores and Hessians.
    """
    values = np.asarray(values, dtype=float)
    v0 = values[0]
    return v0 + sp.a_weight * np.sum(values[1:] - v0, axis=0)


def unscented_moments(sp: SigmaPointSet, f_values: np.ndarray, sigma_nu: np.ndarray,
                      dt: float) -> UnscentedMoments:
    """Moment estimates of the augmented map over a sigma-point set.

    ``f_values[j]`` must be the forward evaluation at ``sp.points[j]``.  The
    center point supplies the mean; the 2*dim spread points feed the
    covariance sums with weight ``a``.
    """
    f_values = np.asarray(f_values, dtype=float)
    a = sp.a_weight
    x_hat = f_values[0]
    d_theta = sp.points[1:] - sp.points[0]
    d_f = f_values[1:] - x_hat
    c_theta_x = a * d_theta.T @ d_f
    c_xx = a * d_f.T @ d_f + sigma_nu / dt
    c_xx = 0.5 * (c_xx + c_xx.T)
    return UnscentedMoments(x_hat=x_hat, c_theta_x=c_theta_x, c_xx=c_xx)


def kalman_update(m_hat: np.ndarray, c_hat: np.ndarray, moments: UnscentedMoments,
                  x: np.ndarray, component: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Gaussian conditioning of (m_hat, c_hat) on the stacked data ``x``."""
    try:
        cho = cho_factor(moments.c_xx, lower=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise ExploitationDegeneracyError(component, str(exc)) from exc
    innovation = x - moments.x_hat
    m_new = m_hat + moments.c_theta_x @ cho_solve(cho, innovation)
    c_new = c_hat - moments.c_theta_x @ cho_solve(cho, moments.c_theta_x.T)
    c_new = 0.5 * (c_new + c_new.T)
    try:
        Gaussian(m_new, c_new)
    except FactorizationError as exc:
        raise ExploitationDegeneracyError(component, str(exc)) from exc
    return m_new, c_new


def weight_update(log_w_hat: float, phi_r_at_mean: float, dt: float) -> float:
    """Single-point reweighting: damp by exp(-dt * misfit at the center point)."""
    return log_w_hat - dt * phi_r_at_mean
