"""
Order-preserving parallel map used by the embarrassingly parallel loops
"""

import concurrent.futures
from typing import Callable, Iterable, List, Optional, TypeVar

from .config import settings
from .logging_config import log

T = TypeVar("T")
R = TypeVar("R")


def resolve_threads(threads: Optional[int] = None) -> int:
    """Explicit argument first, then the configured default."""
    if threads is None:
        threads = settings.runtime.threads
    return max(1, int(threads))


def parallel_map(
    fn: Callable[[T], R],
    items: Iterable[T],
    threads: Optional[int] = None,
    chunksize: int = 1,
) -> List[R]:
    """
    Apply ``fn`` to every item, in a process pool when more than one worker is configured.

    Results come back in input order, so callers see the same list for any worker count.
    ``fn`` must be a module-level function so it can be pickled.
    """
    work = list(items)
    workers = resolve_threads(threads)
    if workers == 1 or len(work) < 2:
        return [fn(item) for item in work]

    log.debug(f"Dispatching {len(work)} tasks to {workers} worker processes")
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, work, chunksize=chunksize))
