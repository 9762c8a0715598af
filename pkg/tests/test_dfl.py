from __future__ import annotations

import numpy as np
import pytest

from resched.dfl import (
    THETA_MIN,
    EstimatorParams,
    TrainConfig,
    curve_to_csv,
    params_from_json,
    params_to_json,
    predict,
    sample_continuous,
    sample_prediction,
    score_gradient,
    train,
)
from resched.scenarios import SIGMA_FLOOR, BaseStats, base_stats, make_dataset
from resched.toy import toy_instance, toy_sampler


def healthy_params(means=(4.0, 6.0, 3.0), stds=(1.2, 2.0, 0.9)):
    return EstimatorParams.initial(BaseStats(means=means, stddevs=stds))


def toy_dataset(seed=0, n_train=100):
    return make_dataset(
        toy_instance(), seed=seed, sizes=(n_train, 10, 50), sampler=toy_sampler()
    )


def test_sample_prediction_near_degenerate_sigma():
    params = healthy_params(means=(4.0, 5.0), stds=(SIGMA_FLOOR, SIGMA_FLOOR))
    rng = np.random.default_rng(0)
    for _ in range(100):
        scenario, _ = sample_prediction(params, rng)
        assert scenario.durations == (4, 5)


def test_sample_prediction_fixed_seed():
    params = healthy_params()
    a = sample_prediction(params, np.random.default_rng(5))
    b = sample_prediction(params, np.random.default_rng(5))
    assert a[0] == b[0]
    assert np.array_equal(a[1], b[1])


def test_sample_prediction_mean_of_stochastic_task():
    ds = toy_dataset(seed=1, n_train=5000)
    params = EstimatorParams.initial(base_stats(ds))
    rng = np.random.default_rng(2)
    draws = np.array([sample_prediction(params, rng)[0][1] for _ in range(10_000)])
    assert abs(draws.mean() - 5.0) <= 0.1


def test_prediction_for_dummy_tasks_is_zero():
    params = healthy_params(means=(0.0, 5.0), stds=(SIGMA_FLOOR, 1.4))
    scenario, _ = sample_prediction(params, np.random.default_rng(1))
    assert scenario[0] == 0
    assert predict(params)[0] == 0


def test_score_gradient_at_the_mean():
    params = healthy_params()
    g = params.mu()
    grad_mu, grad_sigma = score_gradient(params, g, 2.0)
    assert np.allclose(grad_mu, 0.0)
    expected = -2.0 * np.asarray(params.base.stddevs) / params.sigma()
    assert np.allclose(grad_sigma, expected)


def test_score_gradient_zero_loss():
    params = healthy_params()
    g = sample_continuous(params, np.random.default_rng(3))
    grad_mu, grad_sigma = score_gradient(params, g, 0.0)
    assert np.allclose(grad_mu, 0.0)
    assert np.allclose(grad_sigma, 0.0)


def test_score_gradient_masks_untrainable_tasks():
    params = healthy_params(means=(0.0, 5.0, 4.0), stds=(SIGMA_FLOOR, 1.4, SIGMA_FLOOR))
    g = sample_continuous(params, np.random.default_rng(4))
    grad_mu, grad_sigma = score_gradient(params, g, 3.0)
    assert grad_mu[0] == grad_sigma[0] == 0.0
    assert grad_mu[2] == grad_sigma[2] == 0.0
    assert grad_mu[1] != 0.0


def test_score_gradient_unbiased_on_quadratic_surrogate():
    # smoothed loss E[sum_j (g_j - c_j)^2] = sum_j (mu_j - c_j)^2 + sigma_j^2,
    # differentiated by central differences as the independent reference
    rng = np.random.default_rng(12)
    params = healthy_params()
    params.theta_mu = np.array([1.1, 0.9, 1.05])
    params.theta_sigma = np.array([0.95, 1.2, 0.8])
    c = np.array([5.0, 5.0, 2.0])
    n_samples = 40_000

    g = sample_continuous(params, rng, size=n_samples)
    loss = ((g - c) ** 2).sum(axis=1)
    grad_mu, grad_sigma = score_gradient(params, g, loss)

    def smoothed(p):
        return float(((p.mu() - c) ** 2 + p.sigma() ** 2).sum())

    h = 1e-5
    for which in ("theta_mu", "theta_sigma"):
        grads = grad_mu if which == "theta_mu" else grad_sigma
        for j in range(3):
            plus = healthy_params()
            minus = healthy_params()
            for p in (plus, minus):
                p.theta_mu = params.theta_mu.copy()
                p.theta_sigma = params.theta_sigma.copy()
            getattr(plus, which)[j] += h
            getattr(minus, which)[j] -= h
            fd = (smoothed(plus) - smoothed(minus)) / (2 * h)
            mc = grads[:, j].mean()
            se = grads[:, j].std(ddof=1) / np.sqrt(n_samples)
            assert abs(mc - fd) <= 3 * se, (which, j, mc, fd, se)


def test_train_zero_learning_rate_is_identity():
    ds = toy_dataset()
    config = TrainConfig(learning_rate=0.0, epochs=2, seed=0)
    params, curve = train(toy_instance(), ds, config)
    assert np.array_equal(params.theta_mu, np.ones(2))
    assert np.array_equal(params.theta_sigma, np.ones(2))
    assert len(curve) == 2


def test_train_is_deterministic():
    ds = toy_dataset()
    config = TrainConfig(epochs=3, seed=9)
    a_params, a_curve = train(toy_instance(), ds, config)
    b_params, b_curve = train(toy_instance(), ds, config)
    assert np.array_equal(a_params.theta_mu, b_params.theta_mu)
    assert np.array_equal(a_params.theta_sigma, b_params.theta_sigma)
    assert a_curve == b_curve


def test_train_keeps_parameters_positive():
    ds = toy_dataset(seed=3)
    config = TrainConfig(learning_rate=5.0, epochs=3, seed=3)
    params, _ = train(toy_instance(), ds, config)
    assert (params.theta_mu >= THETA_MIN).all()
    assert (params.theta_sigma >= THETA_MIN).all()


def test_train_tiny_learning_rate_barely_moves():
    ds = toy_dataset()
    config = TrainConfig(learning_rate=1e-8, epochs=1, batch_size=100, seed=0)
    params, _ = train(toy_instance(), ds, config)
    assert np.abs(params.theta_mu - 1.0).max() < 1e-4
    assert np.abs(params.theta_sigma - 1.0).max() < 1e-4


def test_predict_rounds_half_up():
    params = healthy_params(means=(4.0, 5.6), stds=(1.0, 1.0))
    assert predict(params).durations == (4, 6)


def test_params_json_round_trip():
    params = healthy_params()
    params.theta_mu = np.array([1.25, 0.8, 1.0])
    again = params_from_json(params_to_json(params))
    assert np.array_equal(again.theta_mu, params.theta_mu)
    assert np.array_equal(again.theta_sigma, params.theta_sigma)
    assert again.base == params.base


def test_curve_csv(tmp_path):
    path = tmp_path / "curve.csv"
    curve_to_csv([3.5, 2.25], path)
    assert path.read_text().splitlines() == [
        "epoch,mean_pregret",
        "0,3.5",
        "1,2.25",
    ]


def test_train_rejects_empty_train_split():
    ds = toy_dataset()
    empty = type(ds)(train=(), validation=ds.validation, test=ds.test, seed=0)
    with pytest.raises(ValueError):
        train(toy_instance(), empty, TrainConfig())


def test_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(learning_rate=-0.1)
    with pytest.raises(ValueError):
        TrainConfig(epochs=0)
    with pytest.raises(ValueError):
        TrainConfig(rho=-1.0)
