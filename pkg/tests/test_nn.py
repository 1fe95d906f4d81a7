"""Tests for the feedforward networks and their model file."""
import json

import numpy as np
import pytest

from src.autodiff.tensor import Tensor
from src.exceptions import ContractError, DataFormatError, ShapeError
from src.nn.mlp import MLPSpec, mlp_forward, mlp_init
from src.nn.serialization import load_networks, save_networks


class TestMLPSpec:
    def test_layer_sizes(self):
        assert MLPSpec(10, [32, 16], 2).layer_sizes() == [10, 32, 16, 2]

    def test_rejects_zero_width(self):
        with pytest.raises(ContractError):
            MLPSpec(3, [0], 1)

    def test_rejects_unknown_transform(self):
        with pytest.raises(ContractError):
            MLPSpec(3, [4], 1, output_transform="tanh")


class TestMLP:
    def test_init_is_seeded(self):
        spec = MLPSpec(4, [8], 2)
        a, b = mlp_init(spec, 5), mlp_init(spec, 5)
        for p, q in zip(a.parameters(), b.parameters()):
            np.testing.assert_array_equal(p.data, q.data)

    def test_kaiming_bound_and_zero_bias(self):
        net = mlp_init(MLPSpec(6, [50], 1), 0)
        weight, bias = net.layers[0]
        assert np.abs(weight.data).max() <= np.sqrt(6.0 / 6)
        assert not bias.data.any()

    def test_forward_matches_predict(self):
        net = mlp_init(MLPSpec(3, [7, 5], 2), 1)
        X = np.random.default_rng(0).standard_normal((9, 3))
        np.testing.assert_allclose(mlp_forward(net, Tensor(X)).data, net.predict(X))

    @pytest.mark.parametrize("transform", ["truncate01", "sigmoid"])
    def test_bounded_outputs(self, transform):
        net = mlp_init(MLPSpec(3, [7], 2, output_transform=transform), 1)
        out = net.predict(10.0 * np.random.default_rng(0).standard_normal((50, 3)))
        assert out.min() >= 0.0 and out.max() <= 1.0

    def test_wrong_input_width(self):
        net = mlp_init(MLPSpec(3, [4], 1), 0)
        with pytest.raises(ShapeError):
            net.predict(np.ones((2, 4)))

    def test_copy_is_independent(self):
        net = mlp_init(MLPSpec(3, [4], 1), 0)
        clone = net.copy()
        clone.layers[0][0].data += 1.0
        assert not np.allclose(net.layers[0][0].data, clone.layers[0][0].data)
        net.load_parameters(clone)
        np.testing.assert_array_equal(net.layers[0][0].data, clone.layers[0][0].data)

    def test_param_count(self):
        assert mlp_init(MLPSpec(3, [4], 2), 0).param_count == 3 * 4 + 4 + 4 * 2 + 2


class TestSerialization:
    def test_save_and_load(self, tmp_path):
        R = mlp_init(MLPSpec(3, [4], 2, output_transform="truncate01"), 0)
        D = mlp_init(MLPSpec(3, [4], 1), 1)
        path = str(tmp_path / "model.json")
        save_networks(path, {"R": R, "D": D}, {"seed": 0})
        networks, meta = load_networks(path)
        assert meta["seed"] == 0
        X = np.random.default_rng(0).standard_normal((5, 3))
        np.testing.assert_array_equal(networks["R"].predict(X), R.predict(X))
        assert networks["R"].spec.output_transform == "truncate01"

    def test_rejects_unknown_format(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text(json.dumps({"format": "other", "version": 1}))
        with pytest.raises(DataFormatError):
            load_networks(str(path))
