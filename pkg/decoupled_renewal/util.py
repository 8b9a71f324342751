from __future__ import annotations

import logging
import math
import time
from contextlib import contextmanager
from logging import Logger
from typing import Any, Dict, Iterator, List, Optional, Sequence

import numpy as np

ROOT_LOGGER_NAME = "decoupled_renewal"

# Sums of marginals are exact integers only up to summation roundoff;
# floor() must not fall to the integer below because of it.
FLOOR_GUARD = 1e-9


class AppLoggerMixIn:
    @property
    def logger(self) -> Logger:
        """
        Every class that mixes this in logs to a child of the package logger
        named after the class, so that the output of a single service can be
        filtered easily.
        """
        return logging.getLogger(ROOT_LOGGER_NAME).getChild(type(self).__name__)


class Timer(AppLoggerMixIn):
    """
    Wall-clock timing for expensive steps such as survival tables and
    whole studies, reported on the 'decoupled_renewal.timer'
    logger. The measurement rides along on the record as
    `record.timer = {"name": ..., "timerResult": seconds}` next to any
    `context` given, see docs/logging.md.

        with Timer("survival-table[alpha=0.5]"):
            build()

        with Timer("lattice", emit_log=False) as timer:
            convolve()
        if timer.result > budget:
            ...
    """

    logger_name: str = f"{ROOT_LOGGER_NAME}.timer"
    precision: int = 6

    def __init__(
        self, name: str, emit_log: bool = True, context: Optional[Dict[str, Any]] = None
    ):
        self.name = name
        self.emit_log = emit_log
        self.context = dict(context or {})
        self.start_time: Optional[float] = None
        self.end_time: Optional[float] = None
        self.result: Optional[float] = None

    @property
    def logger(self) -> Logger:
        return logging.getLogger(self.logger_name)

    @property
    def elapsed(self) -> float:
        """Seconds since start; frozen once the timer is stopped."""
        end = time.perf_counter() if self.end_time is None else self.end_time
        return end - self.start_time

    def start(self) -> Timer:
        self.start_time, self.end_time = time.perf_counter(), None
        return self

    def stop(self, emit_log: Optional[bool] = None) -> Timer:
        self.end_time = time.perf_counter()
        self.result = round(self.end_time - self.start_time, self.precision)
        if self.emit_log if emit_log is None else emit_log:
            self.context["timer"] = {"name": self.name, "timerResult": self.result}
            self.logger.info(f"{self.name} [{self.result}s]", extra=self.context)
        return self

    def __enter__(self) -> Timer:
        return self.start()

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.stop()

    @contextmanager
    def run(self, emit_log: bool = True) -> Iterator[Timer]:
        self.start()
        yield self
        self.stop(emit_log=emit_log)


def readable_list(seq: List[str]) -> str:
    """
    Return a grammatically correct human readable string (with an Oxford comma).
    All values will be quoted:
            [foo, bar, baz]
        becomes
            "foo," "bar," and "baz"
    """
    # Ref: https://stackoverflow.com/a/53981846/
    if len(seq) < 3:
        seq = [f'"{s}"' for s in seq]
        return " and ".join(seq)
    punctuation = [f'"{s},"' for s in seq[:-1]]
    punctuation.append(f'and "{seq[-1]}"')
    return " ".join(punctuation)


def floor_count(value: float) -> int:
    """⌊value⌋ for a count that is mathematically an exact sum of marginals."""
    return int(math.floor(value + FLOOR_GUARD))


def exact_sum(values: Sequence[float]) -> float:
    """
    Compensated (exactly rounded) summation. Infinite entries propagate
    as they would in a plain sum.
    """
    array = np.asarray(values, dtype=float)
    if array.size == 0:
        return 0.0
    if not np.all(np.isfinite(array)):
        return float(np.sum(array))
    return math.fsum(array.tolist())
