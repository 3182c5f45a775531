"""Closed-form benchmark inverse problems with multimodal posteriors.

Each constructor returns a :class:`BenchmarkSpec` carrying the problem, a
recommended run configuration, a reference-grid window, and (where the
gradient-flow comparator needs them) analytic score and Hessian of the log
target.  All forward maps here are cheap vectorized formulas and declare
themselves parallel-safe.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .driver import GmkiConfig
from .errors import ConfigError
from .gaussians import Gaussian, GaussianMixture
from .problems import CallableForwardModel, InverseProblem

VACUOUS_PRIOR_VARIANCE = 1.0e6


@dataclass(frozen=True)
class LogPosteriorDerivatives:
    """Analytic potential, score and Hessian of the log target density.

    ``phi`` is batched over (M, dim); ``grad`` and ``hess`` act pointwise.
    """

    phi: Callable[[np.ndarray], np.ndarray]
    grad: Callable[[np.ndarray], np.ndarray]
    hess: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class BenchmarkSpec:
    name: str
    problem: InverseProblem
    recommended_cfg: GmkiConfig
    reference_bounds: Optional[tuple] = None
    reference_resolution: Optional[tuple] = None
    derivatives: Optional[LogPosteriorDerivatives] = None


def bimodal_1d(case: str = "a") -> BenchmarkSpec:
    """Scalar square map, data y = 1, prior N(3, 4); noise level by case."""
    noise = {"a": 0.2**2, "b": 0.5**2, "c": 1.0**2, "d": 1.5**2}
    case = case.lower()
    if case not in noise:
        raise ConfigError(f"unknown 1-D bimodal case {case!r}")
    forward = CallableForwardModel(
        lambda t: np.array([t[0] ** 2]),
        batch_fn=lambda ts: ts[:, :1] ** 2,
    )
    problem = InverseProblem(forward=forward, y=[1.0], sigma_eta=[[noise[case]]],
                             r0=[3.0], sigma_0=[[4.0]])
    cfg = GmkiConfig(k_components=2, dt=0.5, n_iterations=30, j_samples=1000)
    return BenchmarkSpec(name=f"bimodal1d-{case}", problem=problem, recommended_cfg=cfg,
                         reference_bounds=((-4.0, 6.0),), reference_resolution=(2048,))


def bimodal_2d(case: str = "a") -> BenchmarkSpec:
    """Squared-difference map in 2-D, data y = 4.2297, unit noise."""
    case = case.lower()
    if case == "a":
        r0 = [0.0, 0.0]
    elif case == "b":
        r0 = [0.5, 0.0]
    else:
        raise ConfigError(f"unknown 2-D bimodal case {case!r}")
    forward = CallableForwardModel(
        lambda t: np.array([(t[0] - t[1]) ** 2]),
        batch_fn=lambda ts: (ts[:, :1] - ts[:, 1:2]) ** 2,
    )
    problem = InverseProblem(forward=forward, y=[4.2297], sigma_eta=np.eye(1),
                             r0=r0, sigma_0=np.eye(2))
    cfg = GmkiConfig(k_components=3, dt=0.5, n_iterations=30, j_samples=1000)
    return BenchmarkSpec(name=f"bimodal2d-{case}", problem=problem, recommended_cfg=cfg,
                         reference_bounds=((-4.0, 4.0), (-4.0, 4.0)),
                         reference_resolution=(512, 512))


def fourmodal_2d() -> BenchmarkSpec:
    """Two squared combinations observed; four posterior modes of mixed weight."""
    forward = CallableForwardModel(
        lambda t: np.array([(t[0] - t[1]) ** 2, (t[0] + t[1]) ** 2]),
        batch_fn=lambda ts: np.stack(
            [(ts[:, 0] - ts[:, 1]) ** 2, (ts[:, 0] + ts[:, 1]) ** 2], axis=1),
    )
    problem = InverseProblem(forward=forward, y=[4.2297, 4.2297], sigma_eta=np.eye(2),
                             r0=[0.5, 0.0], sigma_0=np.eye(2))
    cfg = GmkiConfig(k_components=6, dt=0.5, n_iterations=30, j_samples=1000)
    return BenchmarkSpec(name="fourmodal2d", problem=problem, recommended_cfg=cfg,
                         reference_bounds=((-4.0, 4.0), (-4.0, 4.0)),
                         reference_resolution=(512, 512))


def circle_posterior(sigma: float = 0.3) -> BenchmarkSpec:
    """Mass concentrated on the unit circle; a known hard case for the
    Kalman-based method.

    The potential (1 - |theta|^2)^2 / (2 sigma^2) is expressed as the
    inverse problem G(theta) = |theta|^2, y = 1 with a vacuous prior
    N(0, 1e6 I); the prior contribution is bounded by |theta|^2 / (2e6).
    """
    s2 = sigma**2
    forward = CallableForwardModel(
        lambda t: np.array([t[0] ** 2 + t[1] ** 2]),
        batch_fn=lambda ts: np.sum(ts**2, axis=1, keepdims=True),
    )
    problem = InverseProblem(forward=forward, y=[1.0], sigma_eta=[[s2]],
                             r0=[0.0, 0.0],
                             sigma_0=VACUOUS_PRIOR_VARIANCE * np.eye(2))

    def phi(pts):
        pts = np.atleast_2d(pts)
        r2 = np.sum(pts**2, axis=1)
        return (1.0 - r2) ** 2 / (2.0 * s2)

    def grad(theta):
        r2 = float(theta @ theta)
        return 2.0 * (1.0 - r2) * theta / s2

    def hess(theta):
        r2 = float(theta @ theta)
        return (2.0 / s2) * ((1.0 - r2) * np.eye(2) - 2.0 * np.outer(theta, theta))

    cfg = GmkiConfig(k_components=10, dt=0.5, n_iterations=30, j_samples=1000)
    return BenchmarkSpec(name="circle", problem=problem, recommended_cfg=cfg,
                         reference_bounds=((-4.0, 4.0), (-4.0, 4.0)),
                         reference_resolution=(512, 512),
                         derivatives=LogPosteriorDerivatives(phi=phi, grad=grad, hess=hess))


def circle_init_mixture(k: int = 10, seed: int = 0) -> GaussianMixture:
    """Standard-normal means with identity covariances and equal weights."""
    rng = np.random.default_rng([seed, 0])
    comps = tuple(Gaussian(rng.standard_normal(2), np.eye(2)) for _ in range(k))
    return GaussianMixture(comps, np.full(k, -np.log(k)))


def linear_gaussian_1d(y: float = 1.0, prior_mean: float = 0.0, prior_var: float = 1.0,
                       noise_var: float = 1.0) -> BenchmarkSpec:
    """Identity forward map: the posterior is Gaussian and known in closed form."""
    forward = CallableForwardModel(lambda t: t.copy(), batch_fn=lambda ts: ts.copy())
    problem = InverseProblem(forward=forward, y=[y], sigma_eta=[[noise_var]],
                             r0=[prior_mean], sigma_0=[[prior_var]])
    cfg = GmkiConfig(k_components=1, dt=0.5, n_iterations=30, j_samples=1000)
    return BenchmarkSpec(name="linear1d", problem=problem, recommended_cfg=cfg,
                         reference_bounds=((-6.0, 6.0),), reference_resolution=(2048,))


def separated_bimodal_1d(modes=(-8.0, 8.0), weights=(0.3, 0.7)) -> BenchmarkSpec:
    """Direct two-Gaussian target with far-apart unit-variance modes.

    Three observation channels with y = 0, unit noise and a vacuous prior:
    the first is the responsibility-weighted signed distance to the nearest
    mode (slope one there, so the Kalman half-step sees the local unit
    curvature); the second is locally constant and carries the -log w_k
    offsets; the third is a barrier term that vanishes at the modes but
    keeps the potential high in the narrow responsibility-crossover strip
    where the signed distance passes through zero.  Together, half the
    squared residual norm reproduces the mixture potential
    -log(sum_k w_k N(mode_k, 1)) wherever the target carries mass.  A
    single channel sqrt(2 * potential) would instead have zero slope at
    each mode, starving the covariance update.
    """
    modes = np.asarray(modes, dtype=float)
    weights = np.asarray(weights, dtype=float)
    log_w = np.log(weights / weights.sum())
    offsets = 0.5 * np.log(2.0 * np.pi) - log_w
    barrier_scale = np.abs(modes[1] - modes[0])

    def batch(ts):
        ts = np.atleast_2d(ts)
        dev = ts[:, 0:1] - modes
        z = log_w - 0.5 * dev**2
        z = z - np.max(z, axis=1, keepdims=True)
        resp = np.exp(z)
        resp /= np.sum(resp, axis=1, keepdims=True)
        g1 = np.sum(resp * dev, axis=1)
        g2 = np.sqrt(2.0 * np.sum(resp * offsets, axis=1))
        g3 = barrier_scale * np.sqrt(resp[:, 0] * resp[:, 1])
        return np.stack([g1, g2, g3], axis=1)

    forward = CallableForwardModel(lambda t: batch(t[None, :])[0], batch_fn=batch)
    problem = InverseProblem(forward=forward, y=[0.0, 0.0, 0.0], sigma_eta=np.eye(3),
                             r0=[0.0], sigma_0=[[VACUOUS_PRIOR_VARIANCE]])
    cfg = GmkiConfig(k_components=2, dt=0.05, n_iterations=200, j_samples=1000)
    return BenchmarkSpec(name="separated1d", problem=problem, recommended_cfg=cfg,
                         reference_bounds=((-14.0, 14.0),), reference_resolution=(2048,))


BENCHMARKS: dict = {
    "bimodal1d-a": lambda: bimodal_1d("a"),
    "bimodal1d-b": lambda: bimodal_1d("b"),
    "bimodal1d-c": lambda: bimodal_1d("c"),
    "bimodal1d-d": lambda: bimodal_1d("d"),
    "bimodal2d-a": lambda: bimodal_2d("a"),
    "bimodal2d-b": lambda: bimodal_2d("b"),
    "fourmodal2d": fourmodal_2d,
    "circle": circle_posterior,
    "linear1d": linear_gaussian_1d,
    "separated1d": separated_bimodal_1d,
}


def get_benchmark(name: str) -> BenchmarkSpec:
    if name == "ns-desk":
        from .navier_stokes import ns_desk_benchmark  # deferred: heavy setup

        return ns_desk_benchmark()
    try:
        ctor = BENCHMARKS[name]
    except KeyError:
        known = sorted(BENCHMARKS) + ["ns-desk"]
        raise ConfigError(f"unknown benchmark {name!r}; known: {known}") from None
    return ctor()
