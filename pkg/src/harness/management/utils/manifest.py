"""
Описание серии прогонов: сценарий, метод, слой безопасности, сиды
"""

import re
from dataclasses import dataclass
from typing import Any, Dict, Tuple

METHODS = ('mpc-zero-init', 'mpc-ref-init', 'mpc-fixed-interval')
PERCEPTION_SOURCES = ('ground-truth', 'noisy', 'external')

_RANGE = re.compile(r'^(-?\d+)\s*-\s*(-?\d+)$')


def parse_seeds(text: str) -> Tuple[int, ...]:
    """
    Список сидов из строки: '1,2,3', '0-19' или '0-4,10'.
    Порядок сохраняется, повторы убираются.
    """
    seeds = []
    for chunk in str(text).split(','):
        chunk = chunk.strip()
        if not chunk:
            continue
        match = _RANGE.match(chunk)
        if match:
            start, stop = int(match.group(1)), int(match.group(2))
            if stop < start:
                raise ValueError(f"Пустой диапазон сидов: {chunk}")
            values = range(start, stop + 1)
        else:
            try:
                values = [int(chunk)]
            except ValueError:
                raise ValueError(f"Некорректный сид: {chunk!r}") from None
        for seed in values:
            if seed not in seeds:
                seeds.append(seed)
    if not seeds:
        raise ValueError("Требуется хотя бы один сид")
    return tuple(seeds)


def parse_switch(value: str) -> bool:
    normalized = str(value).strip().lower()
    if normalized in ('on', 'true', '1', 'yes'):
        return True
    if normalized in ('off', 'false', '0', 'no'):
        return False
    raise ValueError(f"Ожидалось on/off, получено {value!r}")


@dataclass(frozen=True)
class RunManifest:
    scenario: str
    method: str
    safety: bool
    seeds: Tuple[int, ...]
    out: str
    perception: str = 'ground-truth'
    noise: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, 'seeds', tuple(int(seed) for seed in self.seeds))
        if not self.seeds:
            raise ValueError("Требуется хотя бы один сид")
        if self.method not in METHODS:
            raise ValueError(f"Неизвестный метод {self.method!r}, допустимы: {', '.join(METHODS)}")
        if self.perception not in PERCEPTION_SOURCES:
            raise ValueError(f"Неизвестный источник наблюдений {self.perception!r}")
        if self.noise < 0:
            raise ValueError("Уровень шума не может быть отрицательным")

    @property
    def safety_label(self) -> str:
        return 'on' if self.safety else 'off'

    def to_record(self) -> Dict[str, Any]:
        return {
            'scenario': self.scenario,
            'method': self.method,
            'safety': self.safety_label,
            'seeds': list(self.seeds),
            'out': self.out,
            'perception': self.perception,
            'noise': self.noise,
        }
