"""Tests for Adam, the minibatch streams and the adversarial training loop."""
import numpy as np
import pytest

from src.autodiff.tensor import Tensor
from src.dataset.dataset import Dataset
from src.exceptions import ContractError, DivergenceError, ShapeError
from src.train.adam import AdamState, adam_step
from src.train.sampling import minibatch_iter, sample_reference
from src.train.trainer import build_networks, fit_critic, train_msrl, validation_metric


def _param(value):
    return Tensor(np.array(value, dtype=np.float64), requires_grad=True)


class TestAdam:
    def test_first_step_with_unit_gradient(self):
        param = _param([1.0])
        state = adam_step([param], [np.array([1.0])], AdamState([param]), lr=0.1)
        assert state.step == 1
        assert param.data[0] == pytest.approx(1.0 - 0.1 / (1.0 + 1e-8), abs=1e-12)

    def test_zero_gradient_leaves_params(self):
        param = _param([0.3, -2.0])
        adam_step([param], [np.zeros(2)], AdamState([param]), lr=0.1)
        np.testing.assert_array_equal(param.data, [0.3, -2.0])

    def test_descent_moves_against_gradient(self):
        grad = np.random.default_rng(0).standard_normal(20)
        param = _param(np.zeros(20))
        adam_step([param], [grad], AdamState([param]), lr=0.01)
        np.testing.assert_array_equal(np.sign(param.data), -np.sign(grad))

    def test_ascend_negates(self):
        grad = np.array([0.5, -1.5])
        up, down = _param([0.0, 0.0]), _param([0.0, 0.0])
        adam_step([up], [grad], AdamState([up]), lr=0.1, direction="ascend")
        adam_step([down], [grad], AdamState([down]), lr=0.1)
        np.testing.assert_allclose(up.data, -down.data)

    def test_decoupled_decay(self):
        param = _param([2.0])
        adam_step([param], [np.zeros(1)], AdamState([param]), lr=0.1, wd=0.1)
        assert param.data[0] == pytest.approx(2.0 * (1.0 - 0.01))

    def test_non_finite_gradient_leaves_params(self):
        a, b = _param([1.0]), _param([2.0])
        state = AdamState([a, b])
        with pytest.raises(DivergenceError):
            adam_step([a, b], [np.array([0.1]), np.array([np.nan])], state, lr=0.1)
        assert a.data[0] == 1.0 and b.data[0] == 2.0
        assert state.step == 0

    def test_shape_mismatch(self):
        param = _param([1.0, 2.0])
        with pytest.raises(ShapeError):
            adam_step([param], [np.zeros(3)], AdamState([param]), lr=0.1)


class TestSampling:
    def test_uniform_reference(self):
        U = sample_reference(1000, 2, np.random.default_rng(0))
        assert U.shape == (1000, 2)
        assert U.data.min() >= 0.0 and U.data.max() <= 1.0

    def test_sine_gaussian_reference(self):
        U = sample_reference(500, 1, np.random.default_rng(0), "sine_gaussian")
        assert np.abs(U.data).max() <= 1.0

    def test_reference_means(self):
        n = 20000
        uniform = sample_reference(n, 3, np.random.default_rng(4)).data
        assert np.all(np.abs(uniform.mean(axis=0) - 0.5) < 3.0 / np.sqrt(12.0 * n))
        sine = sample_reference(n, 2, np.random.default_rng(5), "sine_gaussian").data
        sine_sd = np.sqrt((1.0 - np.exp(-2.0)) / 2.0)
        assert np.all(np.abs(sine.mean(axis=0)) < 3.0 * sine_sd / np.sqrt(n))

    def test_custom_sampler_shape_checked(self):
        with pytest.raises(ContractError):
            sample_reference(5, 2, np.random.default_rng(0), lambda n, d, g: np.zeros(n))

    @pytest.mark.parametrize("n,size,expected", [(10, 4, [4, 4, 2]), (9, 4, [4, 4])])
    def test_batch_sizes(self, n, size, expected):
        X = np.arange(n, dtype=float)[:, None]
        data = Dataset(X, Y=X)
        batches = list(minibatch_iter(data, Tensor(X), size, np.random.default_rng(0)))
        assert [b.m for b in batches] == expected

    def test_rows_stay_paired(self):
        X = np.arange(12, dtype=float)[:, None]
        data = Dataset(X, Y=2.0 * X)
        seen = []
        for batch in minibatch_iter(data, Tensor(X), 5, np.random.default_rng(1)):
            np.testing.assert_array_equal(batch.Y.data, 2.0 * batch.X.data)
            np.testing.assert_array_equal(batch.U.data, batch.X.data)
            seen.extend(batch.X.data[:, 0])
        assert len(set(seen)) == len(seen) == 12

    def test_batch_larger_than_data(self):
        X = np.zeros((3, 1))
        with pytest.raises(ContractError):
            next(minibatch_iter(Dataset(X, Y=X), Tensor(X), 4, np.random.default_rng(0)))


class TestBuildNetworks:
    def test_dimensions(self, tiny_config):
        R, D, Q = build_networks(4, 1, tiny_config.replace(d0=2))
        assert R.spec.input_dim == 4 and R.spec.output_dim == 2
        assert D.spec.input_dim == 3
        assert Q.spec.input_dim == 2

    def test_one_critic_per_class(self, tiny_config):
        _, D, _ = build_networks(4, 0, tiny_config, n_classes=3)
        assert len(D) == 3
        assert all(critic.spec.input_dim == 1 for critic in D)


class TestTrainMSRL:
    def test_zero_epochs_returns_initial_networks(self, linear_data, tiny_config):
        train, val = linear_data
        model = train_msrl(train, val, tiny_config.replace(max_epochs=0, patience=0))
        R, _, _ = build_networks(train.d_x, 1, tiny_config)
        assert model.history == []
        assert model.best_epoch == 0
        np.testing.assert_array_equal(model.transform(val.X), R.predict(val.X))

    def test_deterministic(self, linear_data, tiny_config):
        train, val = linear_data
        a = train_msrl(train, val, tiny_config)
        b = train_msrl(train, val, tiny_config)
        assert [str(r) for r in a.history] == [str(r) for r in b.history]
        np.testing.assert_array_equal(a.transform(val.X), b.transform(val.X))
        assert a.restart_index == b.restart_index

    def test_parallel_restarts_match_serial(self, linear_data, tiny_config):
        train, val = linear_data
        serial = train_msrl(train, val, tiny_config)
        parallel = train_msrl(train, val, tiny_config.replace(n_jobs=2))
        assert serial.restart_metrics == parallel.restart_metrics
        np.testing.assert_array_equal(serial.transform(val.X), parallel.transform(val.X))

    def test_returns_best_validation_epoch(self, linear_data, tiny_config):
        train, val = linear_data
        model = train_msrl(train, val, tiny_config.replace(max_epochs=6, patience=6))
        best = max(record.val_metric for record in model.history)
        assert model.val_metric == pytest.approx(best)
        assert model.history[model.best_epoch - 1].val_metric == pytest.approx(best)
        assert model.val_metric == pytest.approx(validation_metric(
            model.R, val, "distance_correlation"
        ))

    def test_selects_best_restart(self, linear_data, tiny_config):
        train, val = linear_data
        model = train_msrl(train, val, tiny_config.replace(restarts=3))
        assert len(model.restart_metrics) == 3
        assert model.restart_index == int(np.argmax(model.restart_metrics))

    def test_without_early_stopping(self, linear_data, tiny_config):
        train, _ = linear_data
        model = train_msrl(train, None, tiny_config.replace(es_metric="none"))
        assert model.best_epoch == len(model.history) == tiny_config.max_epochs

    def test_early_stopping_needs_validation(self, linear_data, tiny_config):
        train, _ = linear_data
        with pytest.raises(ContractError):
            train_msrl(train, None, tiny_config)

    def test_large_batch_is_clamped(self, linear_data, tiny_config):
        train, val = linear_data
        model = train_msrl(train, val, tiny_config.replace(batch_size=1000, restarts=1))
        assert len(model.history) == tiny_config.max_epochs

    def test_divergence(self, linear_data, tiny_config):
        train, val = linear_data

        def broken(n, d0, _):
            return np.full((n, d0), np.nan)

        with pytest.raises(DivergenceError):
            train_msrl(train, val, tiny_config.replace(reference=broken))

    def test_categorical_response(self, tiny_config):
        generator = np.random.default_rng(4)
        X = generator.standard_normal((100, 3))
        labels = (X[:, 0] > 0).astype(int) + (X[:, 1] > 1).astype(int)
        data = Dataset(X, labels=labels)
        train, val = data.subset(range(80)), data.subset(range(80, 100))
        model = train_msrl(train, val, tiny_config)
        assert model.is_categorical
        assert len(model.D) == 3


class TestFitCritic:
    def test_trains_a_copy(self, linear_data, tiny_config):
        train, _ = linear_data
        R, D, _ = build_networks(train.d_x, 1, tiny_config)
        before = D.layers[0][0].data.copy()
        fitted = fit_critic(train, R, tiny_config, D)
        np.testing.assert_array_equal(D.layers[0][0].data, before)
        assert not np.array_equal(fitted.layers[0][0].data, before)

    def test_needs_two_rows(self, tiny_config):
        single = Dataset(np.zeros((1, 2)), Y=np.zeros((1, 1)))
        with pytest.raises(ContractError):
            fit_critic(single, None, tiny_config)
