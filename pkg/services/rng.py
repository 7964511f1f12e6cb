"""
Counter-based random streams
Every block of paths draws from its own Philox stream keyed by (seed, block)
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Tuple, TypeVar

import numpy as np

import config
from config import logger

T = TypeVar('T')

_MASK64 = (1 << 64) - 1


def block_generator(seed: int, block: int, stream: int = 0) -> np.random.Generator:
    """
    Generator for one block of paths

    Args:
        seed: Run seed (64-bit)
        block: Block index
        stream: Sub-stream tag so independent uses of one block never overlap

    Returns:
        numpy Generator backed by Philox with key (seed, stream·2⁴⁰ + block)
    """
    key = np.array([int(seed) & _MASK64, ((int(stream) << 40) + int(block)) & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def block_ranges(n: int, block_size: int = config.RNG_BLOCK_SIZE) -> List[Tuple[int, int, int]]:
    """Split n paths into (block_index, start, stop) ranges"""
    if n < 1:
        return []
    return [(b, start, min(start + block_size, n)) for b, start in enumerate(range(0, n, block_size))]


def map_blocks(fn: Callable[[np.random.Generator, int, int], T], n: int, seed: int,
               block_size: int = config.RNG_BLOCK_SIZE, workers: int = config.MAX_WORKERS,
               stream: int = 0) -> List[T]:
    """
    Run fn(rng, block, size) for every block and return results in block order

    Results do not depend on the number of workers: each block owns its stream
    and results are collected by block index.
    """
    ranges = block_ranges(n, block_size)

    def run(item):
        block, start, stop = item
        return fn(block_generator(seed, block, stream), block, stop - start)

    if workers <= 1 or len(ranges) <= 1:
        return [run(item) for item in ranges]
    logger.debug(f"map_blocks: {len(ranges)} blocks on {workers} workers")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, ranges))
