"""Counter-based, splittable random streams.

Every generator is a Philox instance keyed by
``(master seed, module tag, index, substream tag)``.  Work is cut into chunks
of a fixed size, each chunk owning its own stream, so the result of a run
never depends on how many worker threads executed it.
"""
from __future__ import annotations

import zlib
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

T = TypeVar("T")

DEFAULT_CHUNK = 2000


def tag_id(tag: str | int) -> int:
    if isinstance(tag, int):
        return tag
    return zlib.crc32(tag.encode("utf-8"))


def substream(seed: int, module: str, index: int = 0, sub: str | int = 0) -> np.random.Generator:
    if seed < 0:
        raise ValueError("seed must be a non-negative integer")
    key = (tag_id(module), int(index), tag_id(sub))
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))


def chunk_sizes(total: int, chunk: int = DEFAULT_CHUNK) -> list[int]:
    if total < 0:
        raise ValueError("total must be >= 0")
    sizes = [chunk] * (total // chunk)
    if total % chunk:
        sizes.append(total % chunk)
    return sizes


def map_chunks(fn: Callable[[int, int], T], total: int, threads: int = 1,
               chunk: int = DEFAULT_CHUNK) -> list[T]:
    """Run ``fn(chunk_index, chunk_size)`` over all chunks; results in chunk order."""
    sizes = chunk_sizes(total, chunk)
    if threads <= 1 or len(sizes) <= 1:
        return [fn(i, n) for i, n in enumerate(sizes)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(fn, i, n) for i, n in enumerate(sizes)]
        return [f.result() for f in futures]


def bernoulli_rows(rng: np.random.Generator, probs: Sequence[float] | np.ndarray, rows: int) -> np.ndarray:
    """Draw ``rows`` independent activity vectors; column j is Bernoulli(probs[j])."""
    p = np.asarray(probs, dtype=float)
    return rng.random((rows, p.shape[0])) < p


def seeds_from(items: Iterable[int]) -> list[int]:
    return [int(i) for i in items]
