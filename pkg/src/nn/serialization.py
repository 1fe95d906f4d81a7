"""Module to save and load networks as versioned JSON."""
import json
from typing import Any, Dict, Tuple

import numpy as np

from src.autodiff.tensor import Tensor
from src.constants import MODEL_FORMAT, MODEL_FORMAT_VERSION
from src.exceptions import DataFormatError
from src.nn.mlp import MLP, MLPSpec
from src.utils import LOGGER as logger


def network_to_dict(net: MLP) -> Dict[str, Any]:
    """Return spec and parameters of a network as plain python objects."""
    return {
        "spec": net.spec.to_dict(),
        "layers": [
            {"weight": weight.data.tolist(), "bias": bias.data.tolist()}
            for weight, bias in net.layers
        ],
    }


def network_from_dict(info: Dict[str, Any]) -> MLP:
    """Rebuild a network from `network_to_dict` output."""
    spec = MLPSpec.from_dict(info["spec"])
    layers = [
        (
            Tensor(np.array(layer["weight"], dtype=np.float64).reshape(
                len(layer["bias"]), -1
            ), requires_grad=True),
            Tensor(np.array(layer["bias"], dtype=np.float64), requires_grad=True),
        )
        for layer in info["layers"]
    ]
    return MLP(spec, layers)


def save_networks(
    path: str, networks: Dict[str, Any], meta: Dict[str, Any] = None
) -> None:
    """Write named networks (an MLP or a list of MLPs each) to a JSON file.

    Floats are written with python's shortest round-trip repr, so loading gives
    back bit-identical float64 parameters.
    """
    payload = {
        "format": MODEL_FORMAT,
        "version": MODEL_FORMAT_VERSION,
        "meta": meta or {},
        "networks": {
            name: (
                [network_to_dict(net) for net in value]
                if isinstance(value, (list, tuple))
                else network_to_dict(value)
            )
            for name, value in networks.items()
        },
    }
    with open(path, "w", encoding="utf-8", newline="\n") as file:
        file.write(json.dumps(payload, sort_keys=True, indent=1))
        file.write("\n")
    logger.info(f"[MODEL] Networks {sorted(networks)} saved in {path}")


def load_networks(path: str) -> Tuple[Dict[str, Any], Dict[str, Any]]:
    """Read a file written by `save_networks`; return (networks, meta)."""
    with open(path, "r", encoding="utf-8") as file:
        payload = json.load(file)
    if payload.get("format") != MODEL_FORMAT:
        logger.error(f"[MODEL] File {path} is not a model file")
        raise DataFormatError(f"{path} is not a {MODEL_FORMAT} file")
    if payload.get("version") != MODEL_FORMAT_VERSION:
        raise DataFormatError(
            f"{path} has version {payload.get('version')}, "
            f"expected {MODEL_FORMAT_VERSION}"
        )
    networks = {
        name: (
            [network_from_dict(item) for item in value]
            if isinstance(value, list)
            else network_from_dict(value)
        )
        for name, value in payload["networks"].items()
    }
    return networks, payload.get("meta", {})
