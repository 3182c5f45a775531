"""The exploration half-step: moment-matched power of a Gaussian mixture.

Raising the current mixture rho to the power (1 - dt) spreads it out.  Each
component w_k N(m_k, C_k) contributes a term

    f_k(theta) N(theta; m_k, C_k / (1 - dt))

and we moment-match that term to a single weighted Gaussian by importance
sampling from N(m_k, C_k / (1 - dt)).  All of f_k is evaluated in the
shifted log domain; only relative values matter after normalization but the
absolute constant is kept for comparability with quadrature oracles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ExplorationDegeneracyError, FactorizationError
from .gaussians import (
    Gaussian,
    GaussianMixture,
    gaussian_logpdf,
    mixture_logpdf,
    normalize_log_weights,
    sample_with_factor,
)


@dataclass(frozen=True)
class ExplorationParams:
    dt: float
    j_samples: int
    rng_seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.dt < 1.0:
            raise ValueError("dt must lie in (0, 1)")
        if self.j_samples < 2:
            raise ValueError("j_samples must be >= 2 (sample-covariance denominator)")


def log_f_nk(mix: GaussianMixture, k: int, theta: np.ndarray, dt: float) -> np.ndarray:
    """Log of the component reweighting function f_k, batched over theta."""
    comp = mix.components[k]
    n = mix.dim
    lw_k = mix.log_weights[k]
    const = (0.5 * dt * n * np.log(2.0 * np.pi)
             - 0.5 * n * np.log(1.0 - dt)
             + (1.0 - dt) * lw_k
             + 0.5 * dt * comp.log_det_cov)
    ratio = lw_k + gaussian_logpdf(comp, theta) - mixture_logpdf(mix, theta)
    return const + dt * ratio


def explore_component(mix: GaussianMixture, k: int, params: ExplorationParams,
                      draws: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    """Monte Carlo moment match of one powered component.

    The caller supplies the standard-normal draws (J, dim) so that runs are
    deterministic and common-random-number/equivariance tests are possible.
    Returns ``(log_w_hat, m_hat, c_hat)``.
    """
    comp = mix.components[k]
    dt = params.dt
    j = draws.shape[0]
    scaled_factor = comp.factor / np.sqrt(1.0 - dt)
    samples = sample_with_factor(comp.mean, scaled_factor, draws)
    lf = log_f_nk(mix, k, samples, dt)
    shift = float(np.max(lf))
    f = np.exp(lf - shift)
    f_sum = float(np.sum(f))
    log_w_hat = shift + np.log(f_sum / j)
    m_hat = (f[:, None] * samples).sum(axis=0) / f_sum
    dev = samples - m_hat
    denom = (j - 1) / j * f_sum
    c_hat = (dev * f[:, None]).T @ dev / denom
    c_hat = 0.5 * (c_hat + c_hat.T)
    try:
        Gaussian(m_hat, c_hat)
    except FactorizationError as exc:
        raise ExplorationDegeneracyError(k, str(exc)) from exc
    return log_w_hat, m_hat, c_hat


def exact_single_component(mix: GaussianMixture, dt: float) -> GaussianMixture:
    """Closed form of the power step for K = 1: the reweighting is constant
    in theta, so the target is exactly N(m, C / (1 - dt)) with weight one."""
    comp = mix.components[0]
    cov = comp.cov / (1.0 - dt)
    factor = comp.factor / np.sqrt(1.0 - dt)
    return GaussianMixture((Gaussian(comp.mean, cov, factor),), np.zeros(1))


def explore_mixture(mix: GaussianMixture, params: ExplorationParams,
                    iteration: int = 0) -> GaussianMixture:
    """Exploration step for the whole mixture, normalized log-weights.

    Each component uses an independent RNG sub-stream keyed on
    ``(seed, iteration, k)`` so results do not depend on K or evaluation
    order.  For K = 1 the closed form is exact and used directly.
    """
    if mix.n_components == 1:
        return exact_single_component(mix, params.dt)
    log_ws = np.empty(mix.n_components)
    comps = []
    for k in range(mix.n_components):
        rng = np.random.default_rng([params.rng_seed, 1, iteration, k])
        draws = rng.standard_normal((params.j_samples, mix.dim))
        log_w, m_hat, c_hat = explore_component(mix, k, params, draws)
        log_ws[k] = log_w
        comps.append(Gaussian(m_hat, c_hat))
    return GaussianMixture(tuple(comps), normalize_log_weights(log_ws))
