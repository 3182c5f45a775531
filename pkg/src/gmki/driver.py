"""Iteration driver: exploration then exploitation, with diagnostics.

One iteration of the method spreads the mixture (power step), then pulls
each component toward the data (Kalman step), then renormalizes the
weights.  The driver owns the only mutable state (the current mixture) and
advances it serially; forward evaluations within a step are batched.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import GmkiError
from .exploitation import kalman_update, sigma_points, unscented_moments, weight_update
from .exploration import ExplorationParams, explore_mixture
from .gaussians import Gaussian, GaussianMixture, normalize_log_weights, sample_with_factor
from .problems import AugmentedProblem, InverseProblem, augment, phi_r_from_prediction


@dataclass(frozen=True)
class GmkiConfig:
    k_components: int = 1
    dt: float = 0.5
    n_iterations: int = 30
    j_samples: int = 1000
    seed: int = 0
    init_policy: str = "prior-random"  # or "explicit"

    def __post_init__(self):
        if not 0.0 < self.dt < 1.0:
            raise ValueError("dt must lie in (0, 1)")
        if min(self.k_components, self.n_iterations, self.j_samples) < 1:
            raise ValueError("k_components, n_iterations and j_samples must be >= 1")
        if self.init_policy not in ("prior-random", "explicit"):
            raise ValueError(f"unknown init_policy {self.init_policy!r}")


@dataclass
class IterationRecord:
    iteration: int
    log_weights: np.ndarray
    means: np.ndarray
    cov_fro_norms: np.ndarray
    misfits: np.ndarray
    forward_evals: int
    wall_time: float = 0.0


@dataclass
class RunResult:
    records: list
    mixtures: list  # mixture state per iteration, index 0 = initial

    @property
    def final_mixture(self) -> GaussianMixture:
        return self.mixtures[-1]


class RunAbortedError(GmkiError):
    """A component degenerated mid-run; the last good state is attached."""

    def __init__(self, cause: Exception, iteration: int, partial: RunResult):
        self.cause = cause
        self.iteration = iteration
        self.partial = partial
        super().__init__(f"run aborted at iteration {iteration}: {cause}")


def init_mixture(problem: InverseProblem, cfg: GmkiConfig) -> GaussianMixture:
    """Equal-weight components with means drawn from the prior and the prior
    covariance as every initial covariance."""
    rng = np.random.default_rng([cfg.seed, 0])
    draws = rng.standard_normal((cfg.k_components, problem.n_theta))
    means = sample_with_factor(problem.r0, problem.prior_factor, draws)
    comps = tuple(Gaussian(m, problem.sigma_0.copy()) for m in means)
    log_w = np.full(cfg.k_components, -np.log(cfg.k_components))
    return GaussianMixture(comps, log_w)


def step(mix: GaussianMixture, problem: InverseProblem, cfg: GmkiConfig,
         iteration_index: int, aug: Optional[AugmentedProblem] = None
         ) -> tuple[GaussianMixture, IterationRecord]:
    """One full iteration; returns the new mixture and its diagnostics."""
    t0 = time.perf_counter()
    if aug is None:
        aug = augment(problem)
    params = ExplorationParams(dt=cfg.dt, j_samples=cfg.j_samples, rng_seed=cfg.seed)
    hatted = explore_mixture(mix, params, iteration=iteration_index)

    k_comp = hatted.n_components
    sp_sets = [sigma_points(c.mean, c.factor) for c in hatted.components]
    all_points = np.vstack([sp.points for sp in sp_sets])
    all_f = aug.f_batch(all_points)
    n_eval = all_points.shape[0]

    n_pts = sp_sets[0].points.shape[0]
    new_comps = []
    new_log_w = np.empty(k_comp)
    misfits = np.empty(k_comp)
    for k in range(k_comp):
        sp = sp_sets[k]
        f_vals = all_f[k * n_pts:(k + 1) * n_pts]
        moments = unscented_moments(sp, f_vals, aug.sigma_nu, cfg.dt)
        comp = hatted.components[k]
        m_new, c_new = kalman_update(comp.mean, comp.cov, moments, aug.x, component=k)
        phi0 = aug.misfit(f_vals[0])
        misfits[k] = phi0
        new_log_w[k] = weight_update(hatted.log_weights[k], phi0, cfg.dt)
        new_comps.append(Gaussian(m_new, c_new))
    new_mix = GaussianMixture(tuple(new_comps), normalize_log_weights(new_log_w))

    record = IterationRecord(
        iteration=iteration_index + 1,
        log_weights=new_mix.log_weights.copy(),
        means=new_mix.means,
        cov_fro_norms=np.array([np.linalg.norm(c.cov) for c in new_mix.components]),
        misfits=misfits,
        forward_evals=n_eval,
        wall_time=time.perf_counter() - t0,
    )
    return new_mix, record


def _initial_record(mix: GaussianMixture, problem: InverseProblem,
                    aug: AugmentedProblem) -> IterationRecord:
    f_vals = aug.f_batch(mix.means)
    misfits = np.array([aug.misfit(fv) for fv in f_vals])
    return IterationRecord(
        iteration=0,
        log_weights=mix.log_weights.copy(),
        means=mix.means,
        cov_fro_norms=np.array([np.linalg.norm(c.cov) for c in mix.components]),
        misfits=misfits,
        forward_evals=mix.n_components,
        wall_time=0.0,
    )


def run(problem: InverseProblem, cfg: GmkiConfig,
        initial_mixture: Optional[GaussianMixture] = None) -> RunResult:
    """N iterations from the configured initialization.

    On component degeneracy the run aborts with the last good state
    attached rather than silently dropping the component.
    """
    if cfg.init_policy == "explicit":
        if initial_mixture is None:
            raise ValueError("explicit init_policy requires an initial mixture")
        mix = initial_mixture
    else:
        mix = init_mixture(problem, cfg) if initial_mixture is None else initial_mixture
    aug = augment(problem)
    records = [_initial_record(mix, problem, aug)]
    mixtures = [mix]
    for n in range(cfg.n_iterations):
        try:
            mix, record = step(mix, problem, cfg, n, aug=aug)
        except GmkiError as exc:
            raise RunAbortedError(exc, n, RunResult(records, mixtures)) from exc
        records.append(record)
        mixtures.append(mix)
    return RunResult(records, mixtures)
