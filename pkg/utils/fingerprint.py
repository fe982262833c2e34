"""Content digests for sampled paths and written artifacts."""

import hashlib

import numpy as np


def values_digest(values: np.ndarray) -> str:
    """SHA-256 over the little-endian float64 bytes of `values`.

    Args:
        values: Any array convertible to float64.

    Returns:
        The digest prefixed with the algorithm name.
    """
    data = np.ascontiguousarray(values, dtype="<f8").tobytes()
    return "sha256=" + hashlib.sha256(data).hexdigest()
