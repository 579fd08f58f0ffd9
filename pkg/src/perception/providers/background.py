"""
Фоновый поставщик: блокирующие запросы выполняются в рабочем потоке,
цикл управления забирает последний готовый кадр без ожидания.
"""

import logging
import threading
from concurrent.futures import Future, ThreadPoolExecutor
from typing import Optional

from ..types import ObservationSet
from .base import BaseProvider, WorldView

logger = logging.getLogger(__name__)


class BackgroundProvider(BaseProvider):
    """Обертка над любым поставщиком с передачей неизменяемых кадров"""

    def __init__(self, inner: BaseProvider):
        super().__init__(config=inner.config, road=inner.road)
        self.inner = inner
        self.source = inner.source
        self._executor = ThreadPoolExecutor(max_workers=1, thread_name_prefix='perception')
        self._lock = threading.Lock()
        self._latest: Optional[ObservationSet] = None
        self._pending: Optional[Future] = None

    def _store(self, future: Future) -> None:
        try:
            result = future.result()
        except Exception:
            logger.error("Ошибка фонового наблюдения", exc_info=True)
            return
        with self._lock:
            if self._latest is None or result.timestamp >= self._latest.timestamp:
                self._latest = result

    def submit(self, snapshot: WorldView, ego_id: str) -> bool:
        """
        Ставит снимок мира в обработку, если рабочий поток свободен.

        Returns:
            True, если запрос поставлен
        """
        if self._pending is not None and not self._pending.done():
            return False
        self._pending = self._executor.submit(self.inner.observe, snapshot, ego_id)
        self._pending.add_done_callback(self._store)
        return True

    def latest(self, timestamp: float) -> ObservationSet:
        """Последний готовый кадр; пустой кадр с флагом fallback, если готовых нет"""
        with self._lock:
            latest = self._latest
        if latest is None:
            return ObservationSet(timestamp=timestamp, fallback_used=True, source=self.source,
                                  n_max=self.config.n_max)
        if latest.timestamp < timestamp:
            return latest.as_fallback(timestamp)
        return latest

    def observe(self, world: WorldView, ego_id: str) -> ObservationSet:
        snapshot = world.snapshot() if hasattr(world, 'snapshot') else world
        self.submit(snapshot, ego_id)
        return self.latest(world.time)

    def wait(self, timeout: Optional[float] = None) -> None:
        """Дожидается текущего запроса (для тестов и завершения прогона)"""
        if self._pending is not None:
            self._pending.exception(timeout=timeout)
            # колбэк мог еще не отработать в рабочем потоке
            self._store(self._pending)

    def reset(self) -> None:
        self.wait()
        self.inner.reset()
        with self._lock:
            self._latest = None

    def close(self) -> None:
        self._executor.shutdown(wait=True)
