from concurrent.futures import ThreadPoolExecutor
import logging
import threading


class WorkerPool:
    """Ordered parallel map over independent jobs.

    Results always come back in input order, so reductions stay deterministic
    whatever the worker count.
    """

    def __init__(self, workers=1):
        self.workers = max(1, int(workers))
        self.running = False
        self.executor = None
        self.lock = threading.Lock()
        self.logger = logging.getLogger("sdspace.workers")

    def start(self):
        with self.lock:
            if not self.running:
                self.running = True
                if self.workers > 1:
                    self.executor = ThreadPoolExecutor(
                        max_workers=self.workers, thread_name_prefix="sdspace"
                    )
                self.logger.info(f"Worker pool started with {self.workers} worker(s)")

    def stop(self):
        with self.lock:
            if self.running:
                self.running = False
                if self.executor is not None:
                    self.executor.shutdown(wait=True, cancel_futures=True)
                    self.executor = None
                self.logger.info("Worker pool stopped")

    def map(self, fn, items):
        items = list(items)
        if not self.running:
            self.start()
        if self.executor is None or len(items) < 2:
            return [fn(item) for item in items]
        return list(self.executor.map(fn, items))

    def __enter__(self):
        self.start()
        return self

    def __exit__(self, exc_type, exc, tb):
        self.stop()


_default_pool = WorkerPool(1)


def default_pool():
    return _default_pool
