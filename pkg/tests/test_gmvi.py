import numpy as np
import pytest

from gmki.benchmarks import LogPosteriorDerivatives, circle_posterior
from gmki.errors import StepSizeError
from gmki.gaussians import Gaussian, GaussianMixture, mixture_logpdf
from gmki.gmvi import (
    GmviConfig,
    gmvi_step,
    init_mixture_standard,
    mixture_score,
    run_gmvi,
)


def gaussian_target(mean, cov):
    mean = np.asarray(mean, dtype=float)
    cov = np.asarray(cov, dtype=float)
    prec = np.linalg.inv(cov)

    def phi(pts):
        pts = np.atleast_2d(pts)
        dev = pts - mean
        return 0.5 * np.einsum("ij,jk,ik->i", dev, prec, dev)

    return LogPosteriorDerivatives(
        phi=phi,
        grad=lambda t: -prec @ (np.asarray(t) - mean),
        hess=lambda t: -prec,
    )


def test_score_single_gaussian():
    mix = GaussianMixture((Gaussian([0.0, 0.0], np.eye(2)),), np.zeros(1))
    theta = np.array([0.3, -1.2])
    grad, hess = mixture_score(mix, theta)
    np.testing.assert_allclose(grad, -theta, atol=1e-12)
    np.testing.assert_allclose(hess, -np.eye(2), atol=1e-12)


def test_score_symmetric_midpoint():
    mix = GaussianMixture.from_weights(
        (Gaussian([-2.0], [[1.0]]), Gaussian([2.0], [[1.0]])), [0.5, 0.5])
    grad, _ = mixture_score(mix, np.array([0.0]))
    assert abs(grad[0]) < 1e-12


def test_score_matches_finite_differences():
    rng = np.random.default_rng(0)
    comps = []
    for _ in range(3):
        a = rng.standard_normal((2, 2))
        comps.append(Gaussian(rng.standard_normal(2), a @ a.T + np.eye(2)))
    mix = GaussianMixture.from_weights(tuple(comps), [0.2, 0.5, 0.3])
    theta = rng.standard_normal(2)
    grad, hess = mixture_score(mix, theta)

    h = 1e-5
    fd_grad = np.empty(2)
    fd_hess = np.empty((2, 2))
    for i in range(2):
        e = np.zeros(2)
        e[i] = h
        fd_grad[i] = (mixture_logpdf(mix, theta + e) - mixture_logpdf(mix, theta - e)) / (2 * h)
        gp, _ = mixture_score(mix, theta + e)
        gm, _ = mixture_score(mix, theta - e)
        fd_hess[i] = (gp - gm) / (2 * h)
    np.testing.assert_allclose(grad, fd_grad, atol=1e-6)
    np.testing.assert_allclose(hess, 0.5 * (fd_hess + fd_hess.T), atol=1e-6)


def test_fixed_point_at_target():
    derivs = gaussian_target([0.0, 0.0], np.eye(2))
    mix = GaussianMixture((Gaussian([0.0, 0.0], np.eye(2)),), np.zeros(1))
    out = gmvi_step(mix, derivs, 0.01)
    np.testing.assert_allclose(out.means, mix.means, atol=1e-12)
    np.testing.assert_allclose(out.components[0].cov, np.eye(2), atol=1e-12)
    assert out.log_weights[0] == 0.0


def test_converges_to_gaussian_target():
    mean = np.array([1.0, -1.0])
    cov = np.array([[2.0, 0.5], [0.5, 1.0]])
    derivs = gaussian_target(mean, cov)
    start = GaussianMixture((Gaussian([0.0, 0.0], np.eye(2)),), np.zeros(1))
    cfg = GmviConfig(k_components=1, dt_vi=0.01, n_iterations=1000)
    result = run_gmvi(derivs, cfg, dim=2, initial_mixture=start, record_every=1000)
    final = result.final_mixture.components[0]
    np.testing.assert_allclose(final.mean, mean, atol=1e-4)
    np.testing.assert_allclose(final.cov, cov, atol=1e-4)


def test_weights_stay_on_simplex():
    derivs = gaussian_target([0.5, 0.0], np.eye(2))
    mix = init_mixture_standard(4, 2, seed=0)
    for _ in range(20):
        mix = gmvi_step(mix, derivs, 0.01)
        assert np.sum(mix.weights) == pytest.approx(1.0, abs=1e-12)


def test_weight_drift_direction():
    # the component with larger E[log rho_mix + phi] loses weight
    derivs = gaussian_target([0.0], [[1.0]])
    mix = GaussianMixture.from_weights(
        (Gaussian([0.0], [[1.0]]), Gaussian([5.0], [[1.0]])), [0.5, 0.5])
    out = gmvi_step(mix, derivs, 0.01)
    assert out.weights[0] > 0.5
    assert out.weights[1] < 0.5


def test_oversized_step_raises():
    # a broad target under a tight mixture drives the precision negative
    derivs = gaussian_target([0.0, 0.0], 100.0 * np.eye(2))
    mix = GaussianMixture((Gaussian([0.0, 0.0], 0.01 * np.eye(2)),), np.zeros(1))
    with pytest.raises(StepSizeError):
        gmvi_step(mix, derivs, 10.0)


def test_invalid_step_size_rejected():
    derivs = gaussian_target([0.0], [[1.0]])
    mix = GaussianMixture((Gaussian([0.0], [[1.0]]),), np.zeros(1))
    with pytest.raises(ValueError):
        gmvi_step(mix, derivs, 0.0)


def test_init_mixture_standard_shape():
    mix = init_mixture_standard(10, 2, seed=0)
    assert mix.n_components == 10
    np.testing.assert_allclose(mix.weights, np.full(10, 0.1))
    for c in mix.components:
        np.testing.assert_array_equal(c.cov, np.eye(2))


def test_circle_target_moves_toward_unit_circle():
    spec = circle_posterior()
    mix = init_mixture_standard(4, 2, seed=3)
    cfg = GmviConfig(k_components=4, dt_vi=0.01, n_iterations=300)
    result = run_gmvi(spec.derivatives, cfg, dim=2, initial_mixture=mix, record_every=300)
    radii = np.linalg.norm(result.final_mixture.means, axis=1)
    start_err = np.abs(np.linalg.norm(mix.means, axis=1) - 1.0)
    assert np.max(np.abs(radii - 1.0)) < np.maximum(np.max(start_err), 0.2)


def test_records_compatible_with_run_pipeline():
    derivs = gaussian_target([0.0], [[1.0]])
    cfg = GmviConfig(k_components=2, dt_vi=0.01, n_iterations=10)
    result = run_gmvi(derivs, cfg, dim=1, record_every=5)
    assert result.records[0].iteration == 0
    assert result.records[-1].iteration == 10
    assert all(rec.forward_evals == 0 for rec in result.records)
