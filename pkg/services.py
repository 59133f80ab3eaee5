"""
Worker Pool Management

This module owns the thread pools used to run Monte Carlo trials.

Current Implementation:
- Singleton pattern: one pool per worker count, created lazily
- Pools are shared by CLI runs and the HTTP server
- Explicit shutdown from the server lifespan and at CLI exit

Architecture:
- threads <= 1: no pool, trials run inline in the calling thread
- threads > 1: ThreadPoolExecutor; numpy/LAPACK release the GIL inside the heavy kernels
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Optional

from config import settings

logger = logging.getLogger(__name__)


class WorkerPools:
    """
    Manages worker pools for the bench using the singleton pattern.

    - Lazy creation keyed by worker count
    - Graceful shutdown waits for in-flight trials unless cancelled
    """

    _executors: Dict[int, ThreadPoolExecutor] = {}

    @classmethod
    def get_executor(cls, threads: Optional[int] = None) -> Optional[ThreadPoolExecutor]:
        """Return the shared pool for `threads` workers, or None for inline execution."""
        threads = settings.BENCH_THREADS if threads is None else int(threads)
        if threads < 1:
            raise ValueError(f"threads must be >= 1 (got {threads})")
        if threads == 1:
            return None
        if threads not in cls._executors:
            cls._executors[threads] = ThreadPoolExecutor(
                max_workers=threads, thread_name_prefix=f"bench-{threads}"
            )
            logger.info("🚀 Started bench worker pool with %d threads", threads)
        return cls._executors[threads]

    @classmethod
    def close_all(cls, cancel: bool = False):
        """Shut down every pool; cancel=True drops trials that have not started."""
        for threads, executor in list(cls._executors.items()):
            executor.shutdown(wait=not cancel, cancel_futures=cancel)
            logger.info("✅ Bench worker pool with %d threads closed", threads)
        cls._executors.clear()


# Global worker pools instance
services = WorkerPools()
