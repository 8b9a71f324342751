"""
A small thread pool for grid points and sample batches whose workers never
hold up interpreter exit.

concurrent.futures.ThreadPoolExecutor joins its workers at exit, so a grid
point still running when the wall-clock budget expires would keep the
command line alive until it finished. WorkerPool runs the same Future
protocol on daemon threads instead, and `shutdown(cancel=True)` also raises
a flag that long loops poll through `raise_if_cancelled`.
"""
from __future__ import annotations

import queue
import threading
from concurrent.futures import Future
from typing import Any, Callable, List, Optional

from decoupled_renewal.errors import WorkCancelledError

_worker_state = threading.local()


def raise_if_cancelled():
    """Raises WorkCancelledError inside a worker whose pool has been cancelled."""
    events = getattr(_worker_state, "cancel_events", ())
    if any(event.is_set() for event in events):
        raise WorkCancelledError()


class WorkerPool:
    """
    submit() returns a concurrent.futures.Future. A pool created from inside
    another pool's worker is cancelled together with its parent.
    """

    def __init__(self, max_workers: int, name: str = "worker"):
        self.cancelled = threading.Event()
        self._events = (*getattr(_worker_state, "cancel_events", ()), self.cancelled)
        self._queue: queue.SimpleQueue = queue.SimpleQueue()
        self._threads: List[threading.Thread] = [
            threading.Thread(target=self._work, name=f"{name}-{index}", daemon=True)
            for index in range(max(1, max_workers))
        ]
        for thread in self._threads:
            thread.start()

    def submit(self, fn: Callable[..., Any], *args: Any) -> Future:
        future: Future = Future()
        self._queue.put((future, fn, args))
        return future

    def map(self, fn: Callable[[Any], Any], items) -> List[Any]:
        futures = [self.submit(fn, item) for item in items]
        return [future.result() for future in futures]

    def _work(self):
        _worker_state.cancel_events = self._events
        while True:
            item = self._queue.get()
            if item is None:
                return
            future, fn, args = item
            if not future.set_running_or_notify_cancel():
                continue
            try:
                result = fn(*args)
            except BaseException as error:
                future.set_exception(error)
            else:
                future.set_result(result)

    def shutdown(self, cancel: bool = False):
        if cancel:
            self.cancelled.set()
            while True:
                try:
                    item: Optional[tuple] = self._queue.get_nowait()
                except queue.Empty:
                    break
                if item is not None:
                    item[0].cancel()
        for _ in self._threads:
            self._queue.put(None)

    def __enter__(self) -> WorkerPool:
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.shutdown(cancel=exc_type is not None)
