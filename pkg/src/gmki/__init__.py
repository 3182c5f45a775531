"""Derivative-free Gaussian-mixture Kalman inversion for multimodal
Bayesian inverse problems, with grid oracles, benchmark problems, a
gradient-based variational comparator, and a spectral Navier-Stokes
forward model."""

__version__ = "0.1.0"

from .driver import GmkiConfig, IterationRecord, RunResult, init_mixture, run, step
from .gaussians import (
    Gaussian,
    GaussianMixture,
    gaussian_logpdf,
    mixture_entropy_mc,
    mixture_logpdf,
    normalize_log_weights,
    sample_with_factor,
)
from .problems import (
    AugmentedProblem,
    CallableForwardModel,
    CountingForwardModel,
    ForwardModel,
    InverseProblem,
    augment,
    phi_r,
)

__all__ = [
    "Gaussian",
    "GaussianMixture",
    "GmkiConfig",
    "IterationRecord",
    "RunResult",
    "AugmentedProblem",
    "CallableForwardModel",
    "CountingForwardModel",
    "ForwardModel",
    "InverseProblem",
    "augment",
    "gaussian_logpdf",
    "init_mixture",
    "mixture_entropy_mc",
    "mixture_logpdf",
    "normalize_log_weights",
    "phi_r",
    "run",
    "sample_with_factor",
    "step",
]
