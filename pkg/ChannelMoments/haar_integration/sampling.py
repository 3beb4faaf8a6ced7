"""
Haar-distributed random vectors, unitaries and isometries.

Every random quantity is drawn from a named stream: `stream(seed, *names)` maps
a seed and a tuple of labels (strings or integers) to an independent numpy
`Generator`. Work split into chunks or samples uses one stream per chunk or
sample index, so results never depend on how the work is scheduled.
"""
import logging
import zlib

import numpy as np

from tensor_core.exceptions import InvalidParameterError

logger = logging.getLogger(__name__)


def _stream_key(name):
    if isinstance(name, str):
        return zlib.crc32(name.encode('utf-8'))
    key = int(name)
    if key < 0:
        raise InvalidParameterError(f"Stream labels must be non-negative, got {name}.")
    return key


def stream(seed, *names):
    """
    Independent random generator for the stream `(seed, *names)`.

    Args:
        seed (int): Non-negative 64-bit seed.
        *names (str | int): Stream labels, e.g. `("mc_moment", chunk_index)`.

    Returns:
        (np.random.Generator): PCG64 generator spawned from a `SeedSequence`.

    Raises:
        InvalidParameterError: If the seed or an integer label is negative.
    """
    seed = int(seed)
    if seed < 0:
        raise InvalidParameterError(f"Seed must be non-negative, got {seed}.")
    keys = tuple(_stream_key(name) for name in names)
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=keys))


def complex_gaussian(rng, shape):
    """Independent standard complex Gaussians, E|z|^2 = 1."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def sample_sphere(rng, n, count=None):
    """
    Uniform unit vectors in C^n: normalised complex Gaussian vectors.

    Args:
        rng (np.random.Generator): Source of randomness.
        n (int): Dimension.
        count (int): Batch size; `None` returns a single vector.

    Returns:
        (np.ndarray): Shape (n,) or (count, n).
    """
    rows = 1 if count is None else int(count)
    vectors = complex_gaussian(rng, (rows, n))
    norms = np.linalg.norm(vectors, axis=1)
    # a zero draw has probability 0 but underflow is possible
    while np.any(norms < 1e-150):
        bad = norms < 1e-150
        logger.debug("Redrawing %d degenerate sphere samples", int(bad.sum()))
        vectors[bad] = complex_gaussian(rng, (int(bad.sum()), n))
        norms = np.linalg.norm(vectors, axis=1)
    vectors = vectors / norms[:, None]
    return vectors[0] if count is None else vectors


def _phase_fixed_qr(matrices):
    q, r = np.linalg.qr(matrices)
    diagonal = np.diagonal(r, axis1=-2, axis2=-1)
    modulus = np.abs(diagonal)
    phases = np.where(modulus > 0, diagonal / np.where(modulus > 0, modulus, 1.0), 1.0)
    return q * phases[..., None, :]


def sample_unitary(n, rng, count=None):
    """
    Haar-random unitary matrices.

    A Ginibre matrix is orthonormalised by QR and each column multiplied by the
    phase of the matching diagonal entry of R, which makes the distribution
    exactly Haar.

    Args:
        n (int): Matrix size.
        rng (np.random.Generator): Source of randomness.
        count (int): Batch size; `None` returns a single matrix.

    Returns:
        (np.ndarray): Shape (n, n) or (count, n, n).
    """
    shape = (n, n) if count is None else (int(count), n, n)
    return _phase_fixed_qr(complex_gaussian(rng, shape))


def sample_isometry(d, n, rng):
    """
    Haar-random isometry V: C^n -> C^d, the first n columns of a Haar unitary.

    Raises:
        InvalidParameterError: If n > d, where no isometry exists.
    """
    if n > d:
        raise InvalidParameterError(f"No isometry maps C^{n} into C^{d}.")
    return _phase_fixed_qr(complex_gaussian(rng, (d, n)))
