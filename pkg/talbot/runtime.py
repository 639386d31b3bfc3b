from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Optional, TypeVar

from talbot.db import close_db, init_db

log = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class Runtime:
    """Пул потоков для параллельных участков (точки развёртки по λ, блоки строк ковра)."""

    def __init__(self, threads: int = 1, persistent: bool = False):
        if int(threads) != threads or threads < 1:
            raise ValueError(f"threads must be a positive integer, got {threads!r}")
        self.threads = int(threads)
        self.persistent = persistent
        self._pool: Optional[ThreadPoolExecutor] = None
        if self.threads > 1:
            self._pool = ThreadPoolExecutor(max_workers=self.threads, thread_name_prefix="talbot")

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
        """Как встроенный map, но параллельно; порядок результатов сохраняется."""
        if self._pool is None:
            return [fn(item) for item in items]
        return list(self._pool.map(fn, items))

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown(wait=True)
            self._pool = None


_runtime: Optional[Runtime] = None


def init_runtime(threads: int = 1, db_path: str = "") -> Runtime:
    """Создаёт пул потоков и (если задан путь) подключает журнал запусков."""
    global _runtime
    if _runtime is not None:
        _runtime.close()
    persistent = bool(db_path)
    if persistent:
        init_db(db_path)
    _runtime = Runtime(threads=threads, persistent=persistent)
    log.debug("runtime ready: threads=%d db=%s", _runtime.threads, db_path or "-")
    return _runtime


def get_runtime() -> Runtime:
    if _runtime is None:
        raise RuntimeError("Runtime не инициализирован. Вызовите init_runtime() при старте.")
    return _runtime


def close_runtime() -> None:
    global _runtime
    if _runtime is not None:
        _runtime.close()
        if _runtime.persistent:
            close_db()
    _runtime = None
