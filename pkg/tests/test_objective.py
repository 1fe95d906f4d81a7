"""Tests for the MSRL losses, the categorical objective and the MI estimate."""
import itertools
import logging
from collections import Counter

import numpy as np
import pytest

from src.autodiff.grad_check import grad_check
from src.autodiff.tensor import Tensor
from src.classes import MSRLConfig
from src.dataset.dataset import Dataset
from src.exceptions import ContractError
from src.nn.mlp import MLPSpec, mlp_init
from src.objective.categorical import (
    categorical_mi_estimate,
    categorical_mi_loss,
    categorical_mi_loss_onehot,
)
from src.objective.losses import (
    Batch,
    mi_estimate,
    mi_estimate_from_representation,
    mi_loss,
    mi_loss_permuted,
    msrl_objective,
    push_loss,
    resolve_mode,
    sample_derangement,
)
from src.train.trainer import fit_critic


def brute_force_mi_loss(D, R, X, Y):
    """Double loop over the pairs of the U-statistic."""
    r = R.predict(X)
    m = len(X)
    joint = np.mean([D.predict(np.hstack([Y[i], r[i]])[None, :])[0, 0] for i in range(m)])
    product = [
        np.exp(D.predict(np.hstack([Y[i], r[j]])[None, :])[0, 0])
        for i in range(m)
        for j in range(m)
        if i != j
    ]
    return joint - np.sum(product) / (m * (m - 1))


class TestMode:
    def test_auto_threshold(self):
        assert resolve_mode("auto", 128) == "exact"
        assert resolve_mode("auto", 129) == "permuted"
        assert resolve_mode("permuted", 4) == "permuted"

    def test_unknown_mode(self):
        with pytest.raises(ContractError):
            resolve_mode("sampled", 4)

    @pytest.mark.parametrize("m", [2, 3, 10, 257])
    def test_derangement_has_no_fixed_point(self, m):
        sigma = sample_derangement(m, np.random.default_rng(m))
        assert sorted(sigma) == list(range(m))
        assert not np.any(sigma == np.arange(m))


class TestMILoss:
    @pytest.mark.parametrize("m", [2, 3, 4, 5])
    @pytest.mark.parametrize("seed", range(5))
    def test_matches_double_loop(self, m, seed):
        generator = np.random.default_rng(seed)
        R = mlp_init(MLPSpec(3, [6], 2), seed)
        D = mlp_init(MLPSpec(3, [6], 1), seed + 100)
        X = generator.standard_normal((m, 3))
        Y = generator.standard_normal((m, 1))
        value = mi_loss(D, R, Batch(X, Y=Y)).item()
        assert value == pytest.approx(brute_force_mi_loss(D, R, X, Y), abs=1e-12)

    def test_permutation_invariant(self, small_networks, rng):
        R, D, _ = small_networks
        X = rng.standard_normal((7, 3))
        Y = rng.standard_normal((7, 1))
        order = rng.permutation(7)
        a = mi_loss(D, R, Batch(X, Y=Y)).item()
        b = mi_loss(D, R, Batch(X[order], Y=Y[order])).item()
        assert a == pytest.approx(b, abs=1e-12)

    def test_needs_two_rows(self, small_networks):
        R, D, _ = small_networks
        with pytest.raises(ContractError):
            mi_loss(D, R, Batch(np.ones((1, 3)), Y=np.ones((1, 1))))

    def test_permuted_is_seeded(self, small_networks, small_batch):
        R, D, _ = small_networks
        a = mi_loss_permuted(D, R, small_batch, rng=np.random.default_rng(1)).item()
        b = mi_loss_permuted(D, R, small_batch, rng=np.random.default_rng(1)).item()
        assert a == b

    def test_permuted_needs_rng_or_sigma(self, small_networks, small_batch):
        R, D, _ = small_networks
        with pytest.raises(ContractError):
            mi_loss_permuted(D, R, small_batch)


class TestObjective:
    def test_total_sign_convention(self, small_networks, small_batch):
        R, D, Q = small_networks
        report = msrl_objective(R, D, Q, 2.0, small_batch)
        assert report.total == pytest.approx(2.0 * report.push_term - report.mi_term)
        assert report.loss.item() == pytest.approx(report.total)
        assert report.push_term == pytest.approx(push_loss(Q, R, small_batch).item())

    def test_negative_lambda(self, small_networks, small_batch):
        R, D, Q = small_networks
        with pytest.raises(ContractError):
            msrl_objective(R, D, Q, -1.0, small_batch)

    def test_push_needs_reference(self, small_networks):
        R, _, Q = small_networks
        with pytest.raises(ContractError):
            push_loss(Q, R, Batch(np.ones((4, 3)), Y=np.ones((4, 1))))


def _random_problem(seed):
    """Networks and a 4-row batch drawn from one seed."""
    generator = np.random.default_rng(seed)
    R = mlp_init(MLPSpec(3, [5], 2), seed)
    D = mlp_init(MLPSpec(3, [5], 1), seed + 1000)
    Q = mlp_init(MLPSpec(2, [5], 1), seed + 2000)
    batch = Batch(
        generator.standard_normal((4, 3)),
        Y=generator.standard_normal((4, 1)),
        U=generator.uniform(size=(4, 2)),
        labels=np.array([0, 1, 1, 2]),
    )
    return R, D, Q, batch


class TestGradients:
    """Backward gradients of the losses agree with central differences."""

    @pytest.mark.parametrize("seed", range(50))
    def test_mi_loss(self, seed):
        R, D, _, batch = _random_problem(seed)
        for weight in (R.layers[0][0], D.layers[0][0]):
            assert grad_check(lambda _: mi_loss(D, R, batch), weight, eps=1e-6) < 1e-4

    @pytest.mark.parametrize("seed", range(50))
    def test_mi_loss_permuted(self, seed):
        R, D, _, batch = _random_problem(seed)
        sigma = np.array([1, 2, 3, 0])
        for weight in (R.layers[0][0], D.layers[1][0]):
            error = grad_check(
                lambda _: mi_loss_permuted(D, R, batch, sigma=sigma), weight, eps=1e-6
            )
            assert error < 1e-4

    @pytest.mark.parametrize("seed", range(50))
    def test_push_loss(self, seed):
        R, _, Q, batch = _random_problem(seed)
        for weight in (R.layers[1][0], Q.layers[0][0]):
            assert grad_check(lambda _: push_loss(Q, R, batch), weight, eps=1e-6) < 1e-4

    @pytest.mark.parametrize("seed", range(50))
    def test_msrl_objective(self, seed):
        R, D, Q, batch = _random_problem(seed)
        for weight in (R.layers[0][0], R.layers[1][1], D.layers[0][1], Q.layers[1][0]):
            error = grad_check(
                lambda _: msrl_objective(R, D, Q, 2.0, batch).loss, weight, eps=1e-6
            )
            assert error < 1e-4

    @pytest.mark.parametrize("seed", range(50))
    def test_categorical_mi_loss(self, seed):
        R, _, _, batch = _random_problem(seed)
        critics = [mlp_init(MLPSpec(2, [5], 1), seed + 10 * k) for k in range(3)]
        p_hat = np.array([1, 2, 1]) / 4
        for weight in (R.layers[0][0], critics[1].layers[0][0]):
            error = grad_check(
                lambda _: categorical_mi_loss(critics, R, batch, p_hat), weight, eps=1e-6
            )
            assert error < 1e-4


class TestCategorical:
    def test_onehot_form_agrees(self, rng):
        R = mlp_init(MLPSpec(3, [5], 2), 1)
        critics = [mlp_init(MLPSpec(2, [5], 1), 10 + k) for k in range(3)]
        labels = np.array([0, 1, 2, 0, 1, 1, 2, 0])
        batch = Batch(rng.standard_normal((8, 3)), labels=labels)
        p_hat = np.bincount(labels) / len(labels)
        a = categorical_mi_loss(critics, R, batch, p_hat).item()
        b = categorical_mi_loss_onehot(critics, R, batch, p_hat).item()
        assert a == pytest.approx(b, abs=1e-12)

    def test_absent_class_keeps_exponential_term(self, rng):
        R = mlp_init(MLPSpec(3, [5], 2), 1)
        critics = [mlp_init(MLPSpec(2, [5], 1), 10 + k) for k in range(2)]
        batch = Batch(rng.standard_normal((4, 3)), labels=np.zeros(4, dtype=int))
        value = categorical_mi_loss(critics, R, batch, np.array([0.5, 0.5])).item()
        assert np.isfinite(value)

    def test_absent_class_is_not_a_warning(self, rng, caplog):
        R = mlp_init(MLPSpec(3, [5], 2), 1)
        critics = [mlp_init(MLPSpec(2, [5], 1), 10 + k) for k in range(2)]
        batch = Batch(rng.standard_normal((4, 3)), labels=np.zeros(4, dtype=int))
        with caplog.at_level(logging.WARNING):
            for _ in range(3):
                categorical_mi_loss(critics, R, batch, np.array([0.5, 0.5]))
        assert not [record for record in caplog.records if record.levelno >= logging.WARNING]

    def test_needs_labels(self, small_networks, small_batch):
        R, _, _ = small_networks
        critics = [mlp_init(MLPSpec(2, [5], 1), k) for k in range(2)]
        with pytest.raises(ContractError):
            categorical_mi_loss(critics, R, small_batch, np.array([0.5, 0.5]))

    def test_estimate_is_zero_for_constant_critics(self, rng):
        critics = [mlp_init(MLPSpec(2, [3], 1), k) for k in range(2)]
        for critic in critics:
            for param in critic.parameters():
                param.data[...] = 0.0
        labels = np.array([0, 1, 0, 1])
        assert categorical_mi_estimate(critics, rng.standard_normal((4, 2)), labels) == 0.0


class TestMIEstimate:
    def test_zero_critic_gives_zero(self, rng):
        D = mlp_init(MLPSpec(2, [3], 1), 0)
        for param in D.parameters():
            param.data[...] = 0.0
        r = rng.standard_normal((10, 1))
        Y = rng.standard_normal((10, 1))
        assert mi_estimate_from_representation(D, Y, r) == pytest.approx(0.0, abs=1e-12)

    def test_agrees_with_loss_plus_one(self, small_networks, rng):
        R, D, _ = small_networks
        X = rng.standard_normal((12, 3))
        Y = rng.standard_normal((12, 1))
        expected = mi_loss(D, R, Batch(X, Y=Y)).item() + 1.0
        assert mi_estimate(D, R, Dataset(X, Y=Y)) == pytest.approx(expected, abs=1e-10)

    def test_precomputed_representation(self, small_networks, rng):
        R, D, _ = small_networks
        X = rng.standard_normal((12, 3))
        Y = rng.standard_normal((12, 1))
        a = mi_estimate(D, R, Dataset(X, Y=Y))
        b = mi_estimate(D, None, Dataset(R.predict(X), Y=Y))
        assert a == pytest.approx(b, abs=1e-12)


def _identity(x):
    return x


def _product_critic(z):
    """D(y, r) = y * r on the concatenated (y, r) columns."""
    y = z @ Tensor(np.array([[1.0], [0.0]]))
    r = z @ Tensor(np.array([[0.0], [1.0]]))
    return y * r


class _TableCritic:
    """Critic over two-point (y, r) pairs looked up in a 2x2 table."""

    def __init__(self, table):
        self.table = np.asarray(table, dtype=np.float64)

    def predict(self, pairs):
        return self.table[pairs[:, 0].astype(int), pairs[:, 1].astype(int)][:, None]


def _derangements(m):
    return [p for p in itertools.permutations(range(m)) if all(p[i] != i for i in range(m))]


class TestPermutedSurrogate:
    def test_mean_over_all_derangements_is_exact(self, small_networks, rng):
        R, D, _ = small_networks
        batch = Batch(rng.standard_normal((5, 3)), Y=rng.standard_normal((5, 1)))
        derangements = _derangements(5)
        assert len(derangements) == 44
        values = [
            mi_loss_permuted(D, R, batch, sigma=np.array(sigma)).item()
            for sigma in derangements
        ]
        assert np.mean(values) == pytest.approx(mi_loss(D, R, batch).item(), abs=1e-10)

    def test_derangements_are_drawn_uniformly(self):
        generator = np.random.default_rng(2024)
        counts = Counter(tuple(sample_derangement(5, generator)) for _ in range(44000))
        assert set(counts) == set(_derangements(5))
        assert 800 <= min(counts.values())
        assert max(counts.values()) <= 1200


class TestHandValues:
    def test_mi_loss_two_rows(self):
        batch = Batch(np.array([[0.0], [1.0]]), Y=np.array([[0.0], [1.0]]))
        assert mi_loss(_product_critic, _identity, batch).item() == pytest.approx(-0.5)

    def test_push_loss_half_against_two_draws(self):
        batch = Batch(np.array([[0.5], [0.5]]), U=np.array([[0.0], [1.0]]))
        value = push_loss(_identity, _identity, batch).item()
        assert value == pytest.approx(0.5 - (1.0 + np.e) / 2)
        assert value == pytest.approx(-1.35914, abs=1e-5)

    def test_zero_lambda_ignores_push_critic(self, small_networks, small_batch):
        R, D, Q = small_networks
        before = msrl_objective(R, D, Q, 0.0, small_batch).total
        for param in Q.parameters():
            param.data += 5.0
        assert msrl_objective(R, D, Q, 0.0, small_batch).total == before

    def test_two_point_log_ratio_critic_recovers_kl(self):
        joint = np.array([[0.4, 0.1], [0.1, 0.4]])
        product = np.outer(joint.sum(axis=1), joint.sum(axis=0))
        critic = _TableCritic(np.log(joint / product))
        kl = float(np.sum(joint * np.log(joint / product)))
        # population dual, enumerated over the four cells
        dual = np.sum(joint * critic.table) - np.sum(product * np.exp(critic.table)) + 1.0
        assert dual == pytest.approx(kl, abs=1e-12)
        # sample with the exact cell frequencies; excluding i == j adds chi2 / (n - 1)
        n = 20
        cells = [(a, b) for a in range(2) for b in range(2) for _ in range(round(joint[a, b] * n))]
        pairs = np.array(cells, dtype=np.float64)
        chi2 = float(np.sum(joint**2 / product)) - 1.0
        estimate = mi_estimate_from_representation(critic, pairs[:, :1], pairs[:, 1:])
        assert estimate == pytest.approx(kl + chi2 / (n - 1), abs=1e-10)

    def test_estimate_needs_two_rows(self, small_networks):
        _, D, _ = small_networks
        with pytest.raises(ContractError):
            mi_estimate(D, None, Dataset(np.zeros((1, 2)), Y=np.zeros((1, 1))))


@pytest.mark.slow
class TestGaussianCalibration:
    """A trained critic recovers -1/2 log(1 - rho^2) on a bivariate Gaussian."""

    @pytest.mark.parametrize("rho", [0.0, 0.5, 0.8])
    def test_estimate_close_to_analytic(self, rho):
        generator = np.random.default_rng(0)
        z = generator.standard_normal((5000, 2))
        r = z[:, :1]
        y = rho * z[:, :1] + np.sqrt(1 - rho**2) * z[:, 1:]
        train = Dataset(r[:4000], Y=y[:4000])
        test = Dataset(r[4000:], Y=y[4000:])
        cfg = MSRLConfig(
            d0=1,
            batch_size=256,
            max_epochs=150,
            patience=150,
            d_widths=[32, 32],
            lr=1e-3,
            weight_decay=0.0,
            log_every=0,
        )
        D = fit_critic(train, None, cfg)
        analytic = -0.5 * np.log(1 - rho**2)
        assert abs(mi_estimate(D, None, test) - analytic) < 0.10
