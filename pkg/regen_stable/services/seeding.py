"""
Random-stream management: counter-based splitting of a master seed and
replication-parallel mapping that is independent of the worker count.
"""
import hashlib
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Sequence, TypeVar

import numpy as np

logger = logging.getLogger(__name__)

T = TypeVar("T")


def tag_hash(tag: str) -> int:
    """Stable 32-bit integer for an experiment-kind tag (Python's hash() is salted)."""
    return int.from_bytes(hashlib.sha256(tag.encode("utf-8")).digest()[:4], "little")


def replication_rng(master_seed: int, tag: str, index: int) -> np.random.Generator:
    """Stream for replication `index` of experiment `tag`."""
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(tag_hash(tag), int(index)))
    return np.random.Generator(np.random.PCG64(seq))


def split(rng: np.random.Generator, n: int) -> List[np.random.Generator]:
    """n independent child streams of rng."""
    return rng.spawn(n)


def _run_chunk(fn: Callable[[np.random.Generator], T], master_seed: int, tag: str,
               indices: Sequence[int]) -> List[T]:
    return [fn(replication_rng(master_seed, tag, i)) for i in indices]


def map_replications(
    fn: Callable[[np.random.Generator], T],
    n: int,
    master_seed: int,
    tag: str,
    threads: int = 1,
) -> List[T]:
    """[fn(stream_0), ..., fn(stream_{n-1})] in index order.

    With threads > 1, contiguous index chunks run in worker processes; fn must be
    picklable (a module-level function or a functools.partial of one).
    """
    if threads <= 1 or n < 2:
        return _run_chunk(fn, master_seed, tag, range(n))
    n_chunks = min(n, 4 * threads)
    bounds = np.linspace(0, n, n_chunks + 1).astype(int)
    chunks = [range(bounds[c], bounds[c + 1]) for c in range(n_chunks)]
    logger.debug("running %d replications of %s in %d chunks on %d workers", n, tag,
                 n_chunks, threads)
    results: List[T] = []
    with ProcessPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(_run_chunk, fn, master_seed, tag, chunk) for chunk in chunks]
        for future in futures:
            results.extend(future.result())
    return results
