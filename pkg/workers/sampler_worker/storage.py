"""
Raw Sample Storage

Binary dump of emitted states: a 16-byte header (magic "HSMC", version u16,
d_A u16, d_B u16, 6 reserved bytes) followed by little-endian float64
row-major matrices with interleaved [re, im] entries.
"""

import struct
from collections.abc import Iterable
from pathlib import Path

import numpy as np

from shared.utils.errors import StateFileError
from shared.utils.logging import get_logger

logger = get_logger(__name__)

MAGIC = b"HSMC"
VERSION = 1
HEADER = struct.Struct("<4sHHH6x")
SAMPLE_DTYPE = np.dtype("<c16")


def _header_dims(dims: tuple[int, ...]) -> tuple[int, int]:
    if len(dims) == 1:
        return int(dims[0]), 1
    return int(dims[0]), int(dims[1])


def write_samples(path: str | Path, dims: tuple[int, ...], states: Iterable[np.ndarray]) -> int:
    """
    Stream states to a dump file.

    Returns:
        Number of states written
    """
    d_a, d_b = _header_dims(dims)
    dim = d_a * d_b
    count = 0
    with open(path, "wb") as f:
        f.write(HEADER.pack(MAGIC, VERSION, d_a, d_b))
        for state in states:
            matrix = np.ascontiguousarray(state, dtype=SAMPLE_DTYPE)
            if matrix.shape != (dim, dim):
                raise StateFileError(f"state shape {matrix.shape} does not match dims {dims}")
            f.write(matrix.tobytes())
            count += 1
    logger.info("Wrote raw samples", path=str(path), n_states=count, dims=(d_a, d_b))
    return count


def read_samples(path: str | Path) -> tuple[tuple[int, int], np.ndarray]:
    """
    Load a dump file.

    Returns:
        ((d_A, d_B), array of shape (n, D, D))

    Raises:
        StateFileError: If the header or payload size is invalid
    """
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise StateFileError(f"cannot read sample dump {path}: {e}") from e
    if len(data) < HEADER.size:
        raise StateFileError(f"sample dump {path} is shorter than its header")

    magic, version, d_a, d_b = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise StateFileError(f"bad magic {magic!r} in {path}")
    if version != VERSION:
        raise StateFileError(f"unsupported sample dump version {version}")

    dim = d_a * d_b
    if dim == 0:
        raise StateFileError(f"sample dump {path} declares zero dimensions")
    if (len(data) - HEADER.size) % (dim * dim * SAMPLE_DTYPE.itemsize):
        raise StateFileError(f"payload of {path} is not a whole number of {dim}x{dim} states")
    payload = np.frombuffer(data, dtype=SAMPLE_DTYPE, offset=HEADER.size)
    return (d_a, d_b), payload.reshape(-1, dim, dim).copy()
