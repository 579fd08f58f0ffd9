"""
Сводные таблицы по эпизодам эго
"""

import logging
from typing import Any, Dict, Iterable, List

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.6f'

EPISODE_COLUMNS = [
    'seed', 'episode', 'status', 'complete', 'collision', 'travel_time', 'mean_speed',
    'mean_time_headway', 'headway_samples', 'mean_distance_headway', 'dangerous_incidents',
    'cycles', 'solver_invocations', 'solve_iterations', 'emergencies',
]

SUMMARY_COLUMNS = [
    'scenario', 'method', 'safety', 'seeds', 'episodes', 'completed', 'collisions',
    'collision_rate', 'mean_travel_time', 'mean_travel_speed', 'mean_time_headway',
    'mean_distance_headway', 'mean_dangerous_incidents', 'solver_invocations', 'mean_iterations',
]


def episode_table(episodes: Iterable[Dict[str, Any]]) -> pd.DataFrame:
    """Строка на эпизод из записей метрик (упорядочено по сиду и номеру эпизода)"""
    rows = []
    for record in episodes:
        distance = record.get('distance_headways') or []
        rows.append({
            'seed': record['seed'],
            'episode': record['episode'],
            'status': record.get('status'),
            'complete': bool(record['complete']),
            'collision': bool(record['collision']),
            'travel_time': record.get('travel_time'),
            'mean_speed': record.get('mean_speed'),
            'mean_time_headway': record.get('mean_time_headway'),
            'headway_samples': len(record.get('time_headways') or []),
            'mean_distance_headway': float(np.mean(distance)) if distance else None,
            'dangerous_incidents': record.get('dangerous_incidents', 0),
            'cycles': record.get('cycles', 0),
            'solver_invocations': record.get('solver_invocations', 0),
            'solve_iterations': record.get('solve_iterations', 0),
            'emergencies': record.get('emergencies', 0),
        })
    table = pd.DataFrame(rows, columns=EPISODE_COLUMNS)
    if table.empty:
        return table
    return table.sort_values(['seed', 'episode'], kind='mergesort').reset_index(drop=True)


def _mean(series: pd.Series):
    values = pd.to_numeric(series, errors='coerce').dropna()
    return float(values.mean()) if len(values) else None


def aggregate_table(episodes: pd.DataFrame, scenario: str, method: str, safety: str,
                    seeds: int) -> pd.DataFrame:
    """
    Одна строка на серию. Доля столкновений считается по эпизодам эго,
    время проезда и скорость - только по завершенным эпизодам.
    """
    count = len(episodes)
    collisions = int(episodes['collision'].sum()) if count else 0
    completed = episodes[episodes['complete']] if count else episodes
    invocations = int(episodes['solver_invocations'].sum()) if count else 0
    iterations = int(episodes['solve_iterations'].sum()) if count else 0
    row = {
        'scenario': scenario,
        'method': method,
        'safety': safety,
        'seeds': seeds,
        'episodes': count,
        'completed': len(completed),
        'collisions': collisions,
        'collision_rate': collisions / count if count else None,
        'mean_travel_time': _mean(completed['travel_time']) if count else None,
        'mean_travel_speed': _mean(completed['mean_speed']) if count else None,
        'mean_time_headway': _mean(episodes['mean_time_headway']) if count else None,
        'mean_distance_headway': _mean(episodes['mean_distance_headway']) if count else None,
        'mean_dangerous_incidents': _mean(episodes['dangerous_incidents']) if count else None,
        'solver_invocations': invocations,
        'mean_iterations': iterations / invocations if invocations else None,
    }
    if count and not len(completed):
        logger.warning(f"{method}: ни один из {count} эпизодов не завершен")
    return pd.DataFrame([row], columns=SUMMARY_COLUMNS)


def write_table(table: pd.DataFrame, path) -> None:
    table.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')


def collect_episode_records(outcomes: Iterable[Any]) -> List[Dict[str, Any]]:
    records = []
    for outcome in sorted(outcomes, key=lambda item: item.seed):
        records.extend(outcome.episodes)
    return records
