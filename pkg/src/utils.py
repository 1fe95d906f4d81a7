"""Module for utility functions."""
import logging
from typing import Optional

import numpy as np

LOGGER = logging.getLogger(__name__)
logging.basicConfig(
    level=logging.INFO, format="%(asctime)s - %(levelname)s - %(message)s"
)
# logging.disable(logging.CRITICAL)


def make_rng(seed: Optional[int], *keys: int) -> np.random.Generator:
    """Return an independent PCG64 stream for (seed, *keys).

    Streams with different keys never overlap, so a restart, a fold or a
    generator component can own its randomness without coordination.
    """
    entropy = [0 if seed is None else int(seed)] + [int(k) for k in keys]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def set_verbosity(verbose: bool) -> None:
    """Switch the application logger between INFO and WARNING."""
    LOGGER.setLevel(logging.INFO if verbose else logging.WARNING)
