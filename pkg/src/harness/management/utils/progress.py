"""
Прогресс серии прогонов в консоли (tqdm)
"""

import sys
from contextlib import contextmanager
from typing import Optional

from tqdm import tqdm

BAR_FORMAT = '{l_bar}{bar}| {n_fmt}/{total_fmt} [{elapsed}<{remaining}, {rate_fmt}]'


class ProgressManager:
    """
    Один прогресс-бар на серию сидов. Сообщения о сидах печатаются
    над баром и не ломают его строку.
    """

    def __init__(self, enabled: bool = True, file=sys.stdout):
        self.enabled = enabled
        self.file = file
        self._bar = None

    @contextmanager
    def task(self, description: str, total: Optional[int] = None, unit: str = "сид"):
        if self._bar is not None:
            self._bar.close()
        bar = tqdm(total=total, desc=description, unit=unit, file=self.file, leave=False,
                   disable=not self.enabled, bar_format=BAR_FORMAT)
        self._bar = bar
        try:
            yield bar
        finally:
            bar.close()
            self._bar = None
            if self.enabled:
                print(file=self.file)

    def _write(self, message: str):
        if self._bar is not None and self.enabled:
            self._bar.write(message, file=self.file)
        else:
            print(message, file=self.file)

    def seed_done(self, seed: int, episodes: int, cycles: int, collisions: int = 0):
        """Строка итога одного сида: предупреждение, если были столкновения"""
        if collisions:
            self.warning(f"Сид {seed}: столкновений {collisions} из {episodes} эпизодов")
        else:
            self.step(f"Сид {seed}: {episodes} эпизодов, {cycles} циклов")

    def step(self, message: str):
        self._write(f"🔹 {message}")

    def warning(self, message: str):
        self._write(f"⚠️ {message}")
