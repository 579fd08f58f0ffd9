"""
Команда выгрузки данных для графиков по каталогу трасс
"""

import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from ..utils.plot_data import emit_plot_data

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = 'Столбцовые данные для графиков по трассам прогонов'

    def add_arguments(self, parser):
        parser.add_argument('--traces', type=str, required=True, help='Каталог с файлами trace_seed*.jsonl')
        parser.add_argument('--out', type=str, required=True, help='Каталог для CSV-файлов')

    def handle(self, *args, **options):
        traces_dir = Path(options['traces'])
        if not traces_dir.is_dir():
            raise CommandError(f"Каталог трасс не найден: {traces_dir}")

        traces = sorted(traces_dir.glob('trace_seed*.jsonl'))
        if not traces:
            self.stdout.write(self.style.WARNING(f"⚠️  В {traces_dir} нет трасс, файлы будут содержать только заголовки"))
        else:
            self.stdout.write(f"🔹 Трасс найдено: {len(traces)}")

        written = emit_plot_data(traces, Path(options['out']))
        for name, path in written.items():
            self.stdout.write(self.style.SUCCESS(f"✅ {name}: {path}"))
