import os
from concurrent.futures import ThreadPoolExecutor

ENV_THREADS = "CHERNFLOW_THREADS"


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get(ENV_THREADS, "1")))
    except ValueError:
        return 1


def pmap(fn, items) -> list:
    """Order-preserving map, threaded up to ``CHERNFLOW_THREADS`` workers."""
    items = list(items)
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
