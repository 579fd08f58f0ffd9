"""
Команда повторной проверки безопасности по записанной трассе.
Для каждого цикла с планом отчет строится заново по плану и
наблюдениям из трассы и сравнивается с записанным.
"""

import logging
from collections import Counter
from pathlib import Path

import numpy as np
from django.core.management.base import BaseCommand, CommandError

from common.utils import FileUtils
from perception.types import ObservationSet
from planner.dynamics import RoadGeometry, VehicleParams
from planner.safety import SafetyConfig, verify

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = 'Повторная проверка безопасности планов из трассы'

    def add_arguments(self, parser):
        parser.add_argument('--trace', type=str, required=True, help='Файл трассы JSON Lines')

    def handle(self, *args, **options):
        path = Path(options['trace'])
        if not path.is_file():
            raise CommandError(f"Файл трассы не найден: {path}")

        params = VehicleParams.from_settings()
        safety = SafetyConfig.from_settings(T=params.T)
        road = RoadGeometry.from_settings()
        verdicts = Counter()
        checked = 0
        mismatches = []

        try:
            for record in FileUtils.iter_jsonl(path):
                if record.get('kind') == 'run':
                    road_record = record.get('road') or {}
                    road = RoadGeometry(
                        lane_width=road_record.get('lane_width', road.lane_width),
                        lane_count=road_record.get('lane_count', road.lane_count),
                        segment_length=record.get('segment_length', road.segment_length),
                    )
                    continue
                if record.get('kind') != 'cycle' or record.get('plan') is None:
                    continue
                observations = ObservationSet.from_record(record['observations'])
                report = verify(np.asarray(record['plan'], dtype=float), list(observations), road, safety, params)
                verdicts[report.verdict] += 1
                checked += 1
                recorded = ((record.get('telemetry') or {}).get('safety') or {}).get('verdict')
                if recorded is not None and recorded != report.verdict:
                    mismatches.append((record['time'], recorded, report.verdict))
        except (ValueError, KeyError) as exc:
            raise CommandError(f"Некорректная трасса {path}: {exc}") from exc

        self.stdout.write(f"🔹 Проверено планов: {checked}")
        for verdict, count in sorted(verdicts.items()):
            self.stdout.write(f"   {verdict}: {count}")

        if mismatches:
            for time, recorded, actual in mismatches[:10]:
                self.stdout.write(self.style.ERROR(f"❌ t={time:.1f}: в трассе {recorded}, повторно {actual}"))
            raise CommandError(f"Расхождений с трассой: {len(mismatches)}")
        self.stdout.write(self.style.SUCCESS("✅ Вердикты совпадают с трассой"))
