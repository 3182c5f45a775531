import numpy as np
import pytest

from gmki.errors import DegenerateWeightsError, FactorizationError
from gmki.gaussians import (
    LOG_WEIGHT_FLOOR,
    Gaussian,
    GaussianMixture,
    cholesky_spd,
    gaussian_logpdf,
    mixture_entropy_mc,
    mixture_logpdf,
    normalize_log_weights,
    sample_with_factor,
)

GAUSSIAN_ENTROPY_1D = 0.5 * np.log(2.0 * np.pi * np.e)  # 1.41894


def test_logpdf_standard_normal_at_origin():
    g = Gaussian([0.0], [[1.0]])
    assert gaussian_logpdf(g, [0.0]) == pytest.approx(-0.91893853, abs=1e-8)


def test_logpdf_scaled_normal():
    g = Gaussian([0.0], [[4.0]])
    expected = -0.5 * np.log(2.0 * np.pi) - np.log(2.0) - 0.5
    assert expected == pytest.approx(-2.11208571, abs=1e-8)
    assert gaussian_logpdf(g, [2.0]) == pytest.approx(expected, abs=1e-12)


def test_logpdf_2d_identity():
    g = Gaussian([0.0, 0.0], np.eye(2))
    assert gaussian_logpdf(g, [0.0, 0.0]) == pytest.approx(-np.log(2.0 * np.pi), abs=1e-12)


def test_logpdf_batched_matches_scalar():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((2, 2))
    g = Gaussian(rng.standard_normal(2), a @ a.T + np.eye(2))
    pts = rng.standard_normal((7, 2))
    batched = gaussian_logpdf(g, pts)
    singles = np.array([gaussian_logpdf(g, p) for p in pts])
    np.testing.assert_allclose(batched, singles, rtol=1e-14)


def test_factor_reconstructs_cov():
    rng = np.random.default_rng(0)
    for _ in range(20):
        a = rng.standard_normal((4, 4))
        cov = a @ a.T + 1e-3 * np.eye(4)
        g = Gaussian(np.zeros(4), cov)
        rel = np.linalg.norm(g.factor @ g.factor.T - cov) / np.linalg.norm(cov)
        assert rel <= 1e-10
        assert np.all(np.diag(g.factor) > 0)


def test_asymmetric_covariance_rejected():
    with pytest.raises(FactorizationError):
        Gaussian([0.0, 0.0], [[1.0, 0.5], [0.2, 1.0]])


def test_indefinite_covariance_rejected():
    with pytest.raises(FactorizationError):
        cholesky_spd(np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_precision_is_inverse():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((3, 3))
    cov = a @ a.T + np.eye(3)
    g = Gaussian(np.zeros(3), cov)
    np.testing.assert_allclose(g.precision() @ cov, np.eye(3), atol=1e-10)


def test_general_factor_supported():
    # any square root with factor @ factor.T = cov is accepted
    rng = np.random.default_rng(5)
    l = np.linalg.cholesky(np.array([[2.0, 0.3], [0.3, 1.0]]))
    a = rng.standard_normal((2, 2)) + 2 * np.eye(2)
    factor = a @ l
    cov = factor @ factor.T
    g = Gaussian([0.0, 0.0], cov, factor)
    ref = Gaussian([0.0, 0.0], cov)
    assert g.log_det_cov == pytest.approx(ref.log_det_cov, rel=1e-12)
    pt = np.array([0.7, -0.2])
    assert gaussian_logpdf(g, pt) == pytest.approx(gaussian_logpdf(ref, pt), rel=1e-12)


def test_sampling_zero_draws():
    out = sample_with_factor([1.0, 2.0], np.eye(2), np.zeros((5, 2)))
    np.testing.assert_array_equal(out, np.tile([1.0, 2.0], (5, 1)))


def test_sampling_scalar_scaling():
    out = sample_with_factor([0.0], [[2.0]], [[1.5]])
    assert out[0, 0] == 3.0


def test_sampling_empirical_covariance():
    rng = np.random.default_rng(7)
    l = np.linalg.cholesky(np.array([[4.0, 1.0], [1.0, 2.0]]))
    draws = rng.standard_normal((100_000, 2))
    samples = sample_with_factor(np.zeros(2), l, draws)
    emp = np.cov(samples.T)
    cov = l @ l.T
    assert np.linalg.norm(emp - cov) / np.linalg.norm(cov) < 0.05


def test_sampling_affine_equivariance():
    rng = np.random.default_rng(11)
    mean = rng.standard_normal(2)
    l = np.linalg.cholesky(np.array([[1.5, 0.4], [0.4, 0.9]]))
    a = rng.standard_normal((2, 2)) + np.eye(2)
    b = rng.standard_normal(2)
    draws = rng.standard_normal((64, 2))
    direct = sample_with_factor(a @ mean + b, a @ l, draws)
    mapped = sample_with_factor(mean, l, draws) @ a.T + b
    np.testing.assert_allclose(direct, mapped, rtol=1e-13, atol=1e-13)


def test_normalize_already_normalized():
    lw = np.log([0.2, 0.8])
    np.testing.assert_allclose(normalize_log_weights(lw), lw, atol=1e-14)


def test_normalize_symmetric():
    np.testing.assert_allclose(normalize_log_weights([0.0, 0.0]), np.log([0.5, 0.5]))


def test_normalize_floor():
    out = normalize_log_weights(np.array([0.0, -60.0]))
    assert out[1] == pytest.approx(LOG_WEIGHT_FLOOR, rel=1e-10)
    assert out[0] == pytest.approx(np.log1p(-1e-10), abs=1e-12)


def test_normalize_sums_to_one():
    rng = np.random.default_rng(2)
    for _ in range(10):
        lw = normalize_log_weights(rng.standard_normal(5) * 30)
        assert abs(np.sum(np.exp(lw)) - 1.0) < 1e-12
        assert np.all(lw >= LOG_WEIGHT_FLOOR - 1e-12)


def test_normalize_extreme_magnitudes():
    out = normalize_log_weights(np.array([-1e6, -1e6 + 1.0]))
    assert np.isfinite(out).all()
    # magnitude-1e6 inputs cost ~1e-11 of cancellation in the log domain
    assert np.sum(np.exp(out)) == pytest.approx(1.0, abs=1e-10)


def test_normalize_all_infinite_rejected():
    with pytest.raises(DegenerateWeightsError):
        normalize_log_weights(np.array([-np.inf, -np.inf]))


def test_mixture_singleton_equals_component():
    g = Gaussian([0.3], [[2.0]])
    mix = GaussianMixture((g,), np.zeros(1))
    assert mixture_logpdf(mix, [1.0]) == pytest.approx(gaussian_logpdf(g, [1.0]), rel=1e-14)


def test_mixture_duplicate_components():
    g = Gaussian([0.3], [[2.0]])
    mix = GaussianMixture.from_weights((g, g), [0.5, 0.5])
    assert mixture_logpdf(mix, [1.0]) == pytest.approx(gaussian_logpdf(g, [1.0]), rel=1e-14)


def test_mixture_two_term_sum():
    g1 = Gaussian([0.0], [[1.0]])
    g2 = Gaussian([2.0], [[1.0]])
    mix = GaussianMixture.from_weights((g1, g2), [0.3, 0.7])
    direct = np.log(0.3 * np.exp(gaussian_logpdf(g1, [1.0]))
                    + 0.7 * np.exp(gaussian_logpdf(g2, [1.0])))
    assert mixture_logpdf(mix, [1.0]) == pytest.approx(direct, rel=1e-12)


def test_mixture_dimension_mismatch_rejected():
    with pytest.raises(ValueError):
        GaussianMixture((Gaussian([0.0], [[1.0]]), Gaussian([0.0, 0.0], np.eye(2))),
                        np.log([0.5, 0.5]))


def test_entropy_standard_normal():
    mix = GaussianMixture((Gaussian([0.0], [[1.0]]),), np.zeros(1))
    est, se = mixture_entropy_mc(mix, 10_000, seed=0)
    assert abs(est - GAUSSIAN_ENTROPY_1D) <= 3 * se + 1e-6


def test_entropy_scaled_normal():
    mix = GaussianMixture((Gaussian([0.0], [[4.0]]),), np.zeros(1))
    est, se = mixture_entropy_mc(mix, 10_000, seed=0)
    assert abs(est - (GAUSSIAN_ENTROPY_1D + np.log(2.0))) <= 3 * se + 1e-6


def test_entropy_separated_mixture():
    mix = GaussianMixture.from_weights(
        (Gaussian([-10.0], [[1.0]]), Gaussian([10.0], [[1.0]])), [0.5, 0.5])
    est, se = mixture_entropy_mc(mix, 20_000, seed=1)
    expected = GAUSSIAN_ENTROPY_1D + np.log(2.0)
    assert abs(est - expected) <= 3 * se + 1e-6
