"""Module for the feedforward networks used as representer and critics."""
import copy
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np
from scipy.special import expit

from src.autodiff.tensor import Tensor, as_tensor, leaky_relu, relu, sigmoid
from src.constants import LEAKY_SLOPE
from src.exceptions import ContractError, ShapeError
from src.utils import make_rng

ACTIVATIONS = ("leaky_relu", "relu")
OUTPUT_TRANSFORMS = ("identity", "truncate01", "sigmoid")


class MLPSpec:
    """Class for the architecture of a feedforward network.
    ----
    Params:
    - input_dim: int
        d_X for the representer, d_Y + d0 for the MI critic, d0 for the push critic
    - hidden_widths: Sequence[int]
    - output_dim: int
    - activation: str
        "leaky_relu" (negative slope `leaky_slope`) or "relu"
    - output_transform: str
        "identity", "truncate01" or "sigmoid"
    """

    def __init__(
        self,
        input_dim: int,
        hidden_widths: Sequence[int],
        output_dim: int,
        activation: str = "leaky_relu",
        output_transform: str = "identity",
        leaky_slope: float = LEAKY_SLOPE,
    ):  # pylint: disable=too-many-arguments
        self.input_dim = int(input_dim)
        self.hidden_widths = [int(w) for w in hidden_widths]
        self.output_dim = int(output_dim)
        self.activation = activation
        self.output_transform = output_transform
        self.leaky_slope = float(leaky_slope)
        self.__validate()

    def __str__(self):
        return (
            f"MLPSpec({self.input_dim} -> {self.hidden_widths} -> {self.output_dim}, "
            f"{self.activation}, {self.output_transform})"
        )

    def __validate(self) -> None:
        """Check dimensions and enum values."""
        if min([self.input_dim, self.output_dim] + self.hidden_widths) < 1:
            raise ContractError(f"[MLP] every dimension must be >= 1: {self}")
        if self.activation not in ACTIVATIONS:
            raise ContractError(f"[MLP] unknown activation {self.activation}")
        if self.output_transform not in OUTPUT_TRANSFORMS:
            raise ContractError(
                f"[MLP] unknown output transform {self.output_transform}"
            )

    def layer_sizes(self) -> List[int]:
        """Return [d_in, hidden..., d_out]."""
        return [self.input_dim] + self.hidden_widths + [self.output_dim]

    def to_dict(self) -> Dict[str, Any]:
        """Return a JSON-serialisable description."""
        return {
            "input_dim": self.input_dim,
            "hidden_widths": list(self.hidden_widths),
            "output_dim": self.output_dim,
            "activation": self.activation,
            "output_transform": self.output_transform,
            "leaky_slope": self.leaky_slope,
        }

    @staticmethod
    def from_dict(info: Dict[str, Any]) -> "MLPSpec":
        """Build a spec from `to_dict` output."""
        return MLPSpec(**info)


def truncate01(t: Tensor) -> Tensor:
    """Clamp into [0, 1] as relu(t) - relu(relu(t) - 1)."""
    t = as_tensor(t)
    positive = relu(t)
    return positive - relu(positive - 1.0)


class MLP:
    """Class for a feedforward network of affine layers and activations."""

    def __init__(self, spec: MLPSpec, layers: List[Tuple[Tensor, Tensor]]):
        self.spec = spec
        self.layers = layers
        sizes = spec.layer_sizes()
        if len(layers) != len(sizes) - 1:
            raise ShapeError(f"[MLP] expected {len(sizes) - 1} layers, got {len(layers)}")
        for i, (weight, bias) in enumerate(layers):
            if weight.shape != (sizes[i + 1], sizes[i]) or bias.shape != (sizes[i + 1],):
                raise ShapeError(
                    f"[MLP] layer {i} has shapes {weight.shape}, {bias.shape}; "
                    f"expected {(sizes[i + 1], sizes[i])}, {(sizes[i + 1],)}"
                )

    def __str__(self):
        return f"MLP {self.spec} with {self.param_count} parameters"

    def __call__(self, batch: Tensor) -> Tensor:
        return self.forward(batch)

    @property
    def param_count(self) -> int:
        """Return sum of k_{i+1} (k_i + 1) over layers."""
        return int(sum(w.data.size + b.data.size for w, b in self.layers))

    def get_info(self) -> Dict[str, Any]:
        """Return depth, width and size metadata."""
        return {
            "depth": len(self.layers),
            "width": max(self.spec.layer_sizes()),
            "size": self.param_count,
            "input_dim": self.spec.input_dim,
            "output_dim": self.spec.output_dim,
        }

    def parameters(self) -> List[Tensor]:
        """Return [W_0, b_0, W_1, b_1, ...]."""
        return [p for layer in self.layers for p in layer]

    def zero_grad(self) -> None:
        """Forget accumulated gradients on every parameter."""
        for param in self.parameters():
            param.zero_grad()

    def is_finite(self) -> bool:
        """Return True when every parameter is finite."""
        return all(np.all(np.isfinite(p.data)) for p in self.parameters())

    def copy(self) -> "MLP":
        """Return an independent copy of the network."""
        return MLP(
            copy.deepcopy(self.spec),
            [
                (Tensor(w.data, requires_grad=True), Tensor(b.data, requires_grad=True))
                for w, b in self.layers
            ],
        )

    def load_parameters(self, other: "MLP") -> None:
        """Overwrite parameter values with those of a network of equal shape."""
        for mine, theirs in zip(self.parameters(), other.parameters()):
            mine.data[...] = theirs.data

    def __activate(self, hidden: Tensor) -> Tensor:
        if self.spec.activation == "relu":
            return relu(hidden)
        return leaky_relu(hidden, self.spec.leaky_slope)

    def forward(self, batch: Tensor) -> Tensor:
        """Evaluate the network on a [m x d_in] batch, recording the graph."""
        batch = as_tensor(batch)
        if batch.data.ndim != 2 or batch.shape[1] != self.spec.input_dim:
            raise ShapeError(
                f"[MLP] batch shape {batch.shape} does not match input dim "
                f"{self.spec.input_dim}"
            )
        hidden = batch
        last = len(self.layers) - 1
        for i, (weight, bias) in enumerate(self.layers):
            hidden = hidden @ weight.T + bias
            if i < last:
                hidden = self.__activate(hidden)
        if self.spec.output_transform == "truncate01":
            return truncate01(hidden)
        if self.spec.output_transform == "sigmoid":
            return sigmoid(hidden)
        return hidden

    def predict(self, inputs: np.ndarray) -> np.ndarray:
        """Evaluate the network on a plain array without building a graph."""
        hidden = np.asarray(inputs, dtype=np.float64)
        if hidden.ndim != 2 or hidden.shape[1] != self.spec.input_dim:
            raise ShapeError(
                f"[MLP] input shape {hidden.shape} does not match input dim "
                f"{self.spec.input_dim}"
            )
        last = len(self.layers) - 1
        for i, (weight, bias) in enumerate(self.layers):
            hidden = hidden @ weight.data.T + bias.data
            if i < last:
                if self.spec.activation == "relu":
                    hidden = np.maximum(hidden, 0.0)
                else:
                    hidden = np.where(hidden > 0, hidden, self.spec.leaky_slope * hidden)
        if self.spec.output_transform == "truncate01":
            return np.clip(hidden, 0.0, 1.0)
        if self.spec.output_transform == "sigmoid":
            return expit(hidden)
        return hidden


def mlp_init(spec: MLPSpec, seed: int) -> MLP:
    """Draw Kaiming-uniform weights (bound sqrt(6 / fan_in)) and zero biases."""
    rng = make_rng(seed)
    sizes = spec.layer_sizes()
    layers = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = np.sqrt(6.0 / fan_in)
        weight = rng.uniform(-bound, bound, size=(fan_out, fan_in))
        layers.append(
            (Tensor(weight, requires_grad=True), Tensor(np.zeros(fan_out), requires_grad=True))
        )
    return MLP(spec, layers)


def mlp_forward(net: MLP, batch: Tensor) -> Tensor:
    """Evaluate `net` on a batch."""
    return net.forward(batch)
