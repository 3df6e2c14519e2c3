"""
Ordered data-parallel map used by batch density evaluation and fitting.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

import numpy as np

from .config_default import load_settings
from .hardware import HardwareDetector

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(func: Callable[[T], R], items: Sequence[T], workers: int = 1) -> List[R]:
    """Apply func to every item, returning results in input order."""
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as executor:
        return list(executor.map(func, items))


def row_chunks(n_rows: int, row_bytes: int, workers: Optional[int] = None) -> List[slice]:
    """Split range(n_rows) into memory-bounded contiguous slices."""
    settings = load_settings()
    detector = HardwareDetector()
    workers = workers or detector.workers(settings.workers)
    size = detector.chunk_rows(row_bytes, settings.chunk_rows, workers)
    chunks = [slice(start, min(start + size, n_rows)) for start in range(0, n_rows, size)]
    logger.debug("%d rows -> %d chunks of <= %d rows", n_rows, len(chunks), size)
    return chunks


def default_workers() -> int:
    return HardwareDetector().workers(load_settings().workers)


def chunked_sum(
    func: Callable[[slice], np.ndarray], n_rows: int, row_bytes: int
) -> np.ndarray:
    """Sum func(chunk) over memory-bounded chunks, reduced in chunk order."""
    workers = default_workers()
    parts = ordered_map(func, row_chunks(n_rows, row_bytes, workers), workers)
    total = parts[0]
    for part in parts[1:]:
        total = total + part
    return total


def chunked_concat(
    func: Callable[[slice], np.ndarray], n_rows: int, row_bytes: int
) -> np.ndarray:
    """Concatenate func(chunk) over memory-bounded chunks in chunk order."""
    workers = default_workers()
    parts = ordered_map(func, row_chunks(n_rows, row_bytes, workers), workers)
    return np.concatenate(parts, axis=0)
