"""
Утилиты для работы с файлами результатов (трассы, таблицы, сводки).
"""

import json
import os
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Callable, Dict, Iterator, Union

import numpy as np

PathLike = Union[str, os.PathLike]


class FileUtils:
    """Утилиты для работы с файлами."""

    @staticmethod
    def ensure_directory(path: PathLike) -> Path:
        """
        Создает каталог (с родителями), если его нет.

        Returns:
            Путь к каталогу
        """
        directory = Path(path)
        directory.mkdir(parents=True, exist_ok=True)
        return directory

    @staticmethod
    def seed_file(directory: PathLike, prefix: str, seed: int, ext: str) -> Path:
        """
        Генерирует путь файла для конкретного сида.

        Args:
            directory: Каталог вывода
            prefix: Префикс имени ('trace', 'metrics')
            seed: Сид прогона
            ext: Расширение без точки

        Returns:
            Путь вида <directory>/<prefix>_seed<seed>.<ext>
        """
        return Path(directory) / f'{prefix}_seed{int(seed)}.{ext}'

    @staticmethod
    def to_builtin(value: Any) -> Any:
        """Приводит numpy-значения к встроенным типам для JSON."""
        if isinstance(value, np.ndarray):
            return [FileUtils.to_builtin(item) for item in value.tolist()]
        if isinstance(value, (np.floating,)):
            return float(value)
        if isinstance(value, (np.integer,)):
            return int(value)
        if isinstance(value, (np.bool_,)):
            return bool(value)
        if isinstance(value, dict):
            return {str(key): FileUtils.to_builtin(item) for key, item in value.items()}
        if isinstance(value, (list, tuple)):
            return [FileUtils.to_builtin(item) for item in value]
        return value

    @staticmethod
    def dumps_record(record: Dict[str, Any]) -> str:
        """Детерминированная сериализация записи (сортированные ключи)."""
        return json.dumps(FileUtils.to_builtin(record), sort_keys=True, ensure_ascii=False)

    @staticmethod
    @contextmanager
    def jsonl_writer(path: PathLike) -> Iterator[Callable[[Dict[str, Any]], None]]:
        """
        Открывает файл JSON Lines на запись.

        Yields:
            Функция, дописывающая одну запись в конец файла
        """
        with open(path, 'w', encoding='utf-8', newline='\n') as handle:
            def write(record: Dict[str, Any]) -> None:
                handle.write(FileUtils.dumps_record(record))
                handle.write('\n')

            yield write

    @staticmethod
    def iter_jsonl(path: PathLike) -> Iterator[Dict[str, Any]]:
        """Построчное чтение JSON Lines (пустые строки пропускаются)."""
        with open(path, 'r', encoding='utf-8') as handle:
            for line in handle:
                line = line.strip()
                if line:
                    yield json.loads(line)

    @staticmethod
    def write_json(path: PathLike, payload: Dict[str, Any]) -> None:
        """Записывает один JSON-документ с отступами."""
        with open(path, 'w', encoding='utf-8', newline='\n') as handle:
            json.dump(FileUtils.to_builtin(payload), handle, sort_keys=True, indent=2, ensure_ascii=False)
            handle.write('\n')
