"""
Chunked, seeded Monte Carlo estimation of matrix-valued integrals.

The sample budget is cut into fixed-size chunks. Chunk `c` draws from stream
`(seed, name, c)` and is reduced to its mean and centred sums of squares; the
chunk statistics are merged in chunk order. The chunk layout depends only on
the sample count and the integrand's shape, so the estimate is identical for
any number of worker threads and any memory cap. The cap only bounds how many
chunks are evaluated at once.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from tensor_core.exceptions import InvalidParameterError

from .models import MCEstimate
from .sampling import stream

logger = logging.getLogger(__name__)


MAX_CHUNK_SAMPLES = 4096

# Complex entries produced by one chunk; fixes the chunk layout.
CHUNK_ENTRIES = 2 ** 20

# Default cap on complex entries held by chunks in flight.
DEFAULT_CHUNK_ELEMENTS = 2 ** 22


def chunk_plan(samples, entries):
    """
    Chunk size and chunk count for `samples` draws of an integrand with `entries` entries.

    Returns:
        (tuple): `(chunk_size, chunk_count)`.
    """
    size = max(1, min(MAX_CHUNK_SAMPLES, CHUNK_ENTRIES // max(entries, 1)))
    return size, math.ceil(samples / size)


def concurrent_chunks(size, entries, workers, chunk_elements=DEFAULT_CHUNK_ELEMENTS):
    """Chunks evaluated at once: at most `workers`, at least 1, within the memory cap."""
    return max(1, min(workers, chunk_elements // (size * max(entries, 1))))


def _chunk_statistics(values):
    mean = values.mean(axis=0)
    m2_real = np.sum((values.real - mean.real) ** 2, axis=0)
    m2_imag = np.sum((values.imag - mean.imag) ** 2, axis=0)
    return values.shape[0], mean, m2_real, m2_imag


def _merge(left, right):
    count_a, mean_a, re_a, im_a = left
    count_b, mean_b, re_b, im_b = right
    count = count_a + count_b
    delta = mean_b - mean_a
    weight = count_a * count_b / count
    return (
        count,
        mean_a + delta * (count_b / count),
        re_a + re_b + delta.real ** 2 * weight,
        im_a + im_b + delta.imag ** 2 * weight,
    )


def mc_estimate(integrand, shape, samples, seed, name, workers=1, chunk_elements=DEFAULT_CHUNK_ELEMENTS):
    """
    Estimate E[f] where `integrand(rng, count)` returns `count` draws of f.

    Args:
        integrand (callable): `(rng, count) -> ndarray` of shape `(count, *shape)`.
        shape (tuple): Shape of one draw of f; `()` for scalars.
        samples (int): Total number of draws N, at least 2.
        seed (int): Non-negative seed.
        name (str): Stream label, distinct per integral so estimates are independent.
        workers (int): Threads evaluating chunks concurrently.
        chunk_elements (int): Cap on complex entries held by the chunks in flight; bounds
            concurrency only and never changes the estimate.

    Returns:
        (MCEstimate): Mean, pooled per-entry standard error and N.

    Raises:
        InvalidParameterError: If fewer than 2 samples are requested.
    """
    samples = int(samples)
    if samples < 2:
        raise InvalidParameterError(f"Monte Carlo needs at least 2 samples, got {samples}.")
    shape = tuple(shape)
    entries = math.prod(shape)
    size, chunks = chunk_plan(samples, entries)
    threads = concurrent_chunks(size, entries, workers, chunk_elements)
    logger.debug("MC %s: %d samples in %d chunks of %d, %d threads", name, samples, chunks, size, threads)

    def run_chunk(index):
        count = min(size, samples - index * size)
        values = np.asarray(integrand(stream(seed, name, index), count), dtype=complex)
        if values.shape != (count,) + shape:
            raise InvalidParameterError(
                f"Integrand returned shape {values.shape}, expected {(count,) + shape}."
            )
        return _chunk_statistics(values)

    if threads > 1 and chunks > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            statistics = list(executor.map(run_chunk, range(chunks)))
    else:
        statistics = [run_chunk(index) for index in range(chunks)]

    total = statistics[0]
    for chunk in statistics[1:]:
        total = _merge(total, chunk)
    count, mean, m2_real, m2_imag = total
    variance = (m2_real + m2_imag) / (count - 1)
    return MCEstimate(mean=np.asarray(mean, dtype=complex), stderr=np.sqrt(variance / count), samples=count)
