"""
Столбцовые данные для графиков: время проезда, интервалы до лидера,
гистограмма интервалов и профили скорости. Изображения не строятся.
"""

import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List

import numpy as np
import pandas as pd

from common.utils import FileUtils
from traffic.metrics import MIN_HEADWAY_SPEED
from .aggregate import write_table

logger = logging.getLogger(__name__)

HISTOGRAM_BIN = 0.25  # с
HISTOGRAM_RANGE = 6.0  # с, правая граница по умолчанию

TRAVEL_TIME_COLUMNS = ['scenario', 'method', 'safety', 'seed', 'episode', 'status', 'travel_time', 'mean_speed']
HEADWAY_COLUMNS = ['scenario', 'method', 'safety', 'seed', 'episode', 'time', 'time_headway', 'distance_headway']
HISTOGRAM_COLUMNS = ['method', 'safety', 'bin_left', 'bin_right', 'count']
SPEED_COLUMNS = ['scenario', 'method', 'safety', 'seed', 'episode', 'time', 'x', 'y', 'v_x', 'v_des']


def headway_histogram(samples: Iterable[float], width: float = HISTOGRAM_BIN) -> List[Dict[str, float]]:
    """Бины фиксированной ширины; сумма count равна числу отсчетов"""
    samples = np.asarray(list(samples), dtype=float)
    if samples.size == 0:
        return []
    lower = min(0.0, float(np.floor(samples.min() / width) * width))
    upper = max(HISTOGRAM_RANGE, float(np.ceil(samples.max() / width) * width))
    edges = np.arange(lower, upper + width / 2.0, width)
    counts, edges = np.histogram(samples, bins=edges)
    return [{'bin_left': float(left), 'bin_right': float(right), 'count': int(count)}
            for left, right, count in zip(edges[:-1], edges[1:], counts)]


def trace_rows(records: Iterable[Dict[str, Any]]) -> Dict[str, List[Dict[str, Any]]]:
    """Строки всех таблиц по записям одной трассы"""
    rows = {'travel_times': [], 'headways': [], 'speed_profiles': []}
    run = {'scenario': None, 'method': None, 'safety': None, 'seed': None}
    warmup = 0.0
    for record in records:
        kind = record.get('kind')
        if kind == 'run':
            run = {
                'scenario': record['scenario'],
                'method': record['method'],
                'safety': 'on' if record['safety'] else 'off',
                'seed': record['seed'],
            }
            warmup = record.get('warmup', 0.0)
        elif kind == 'episode':
            metrics = record.get('metrics') or {}
            rows['travel_times'].append({
                **run,
                'episode': record['episode'],
                'status': record['status'],
                'travel_time': metrics.get('travel_time'),
                'mean_speed': metrics.get('mean_speed'),
            })
        elif kind == 'cycle':
            if record['time'] < warmup - 1e-9:
                continue
            ego = record['ego']
            base = {**run, 'episode': record['episode'], 'time': record['time']}
            leader = record.get('leader')
            if leader is not None and ego['v_x'] > MIN_HEADWAY_SPEED:
                rows['headways'].append({
                    **base,
                    'time_headway': leader['gap'] / ego['v_x'],
                    'distance_headway': leader['gap'],
                })
            telemetry = record.get('telemetry') or {}
            rows['speed_profiles'].append({
                **base,
                'x': ego['x'],
                'y': ego['y'],
                'v_x': ego['v_x'],
                'v_des': telemetry.get('v_des'),
            })
    return rows


def emit_plot_data(traces: Iterable[Path], out: Path) -> Dict[str, Path]:
    """
    Пишет travel_times.csv, headways.csv, headway_histogram.csv
    и speed_profiles.csv. Пустой набор трасс дает файлы только
    с заголовками.

    Returns:
        Пути записанных файлов по имени таблицы
    """
    out = FileUtils.ensure_directory(out)
    tables = {'travel_times': [], 'headways': [], 'speed_profiles': []}
    for path in sorted(Path(trace) for trace in traces):
        logger.info(f"Чтение трассы {path}")
        for name, rows in trace_rows(FileUtils.iter_jsonl(path)).items():
            tables[name].extend(rows)

    histogram = []
    groups: Dict[tuple, List[float]] = {}
    for row in tables['headways']:
        groups.setdefault((row['method'], row['safety']), []).append(row['time_headway'])
    for (method, safety), samples in sorted(groups.items()):
        for item in headway_histogram(samples):
            histogram.append({'method': method, 'safety': safety, **item})

    columns = {
        'travel_times': TRAVEL_TIME_COLUMNS,
        'headways': HEADWAY_COLUMNS,
        'headway_histogram': HISTOGRAM_COLUMNS,
        'speed_profiles': SPEED_COLUMNS,
    }
    tables['headway_histogram'] = histogram
    written = {}
    for name, rows in tables.items():
        path = out / f'{name}.csv'
        write_table(pd.DataFrame(rows, columns=columns[name]), path)
        written[name] = path
    return written
