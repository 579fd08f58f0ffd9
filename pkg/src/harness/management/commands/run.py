"""
Команда прогона сценария одним методом на серии сидов.
Каждый сид выполняется независимо (при --workers > 1 в отдельных
процессах); итоговая таблица собирается одним писателем.
"""

import logging
from concurrent.futures import ProcessPoolExecutor, as_completed

import django
from django.core.management.base import BaseCommand, CommandError

from common.utils import FileUtils
from traffic.exceptions import ScenarioConfigError
from traffic.scenario import load_scenario
from ..runners import RUNNERS, execute_seed
from ..utils.aggregate import aggregate_table, collect_episode_records, episode_table, write_table
from ..utils.manifest import METHODS, RunManifest, parse_seeds, parse_switch
from ..utils.progress import ProgressManager

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = 'Прогон сценария методом планирования на серии сидов'

    def add_arguments(self, parser):
        parser.add_argument('--scenario', type=str, required=True,
                            help='Файл сценария YAML или имя встроенного сценария')
        parser.add_argument('--method', type=str, choices=METHODS, default='mpc-zero-init',
                            help='Метод планирования')
        parser.add_argument('--safety', type=str, default='on', help='Слой проверки безопасности: on|off')
        parser.add_argument('--seeds', type=str, default='0', help="Сиды: '0,1,2' или '0-19'")
        parser.add_argument('--out', type=str, required=True, help='Каталог результатов')
        parser.add_argument('--workers', type=int, default=1, help='Число рабочих процессов')
        parser.add_argument('--perception', type=str, default='ground-truth',
                            choices=['ground-truth', 'noisy', 'external'],
                            help='Источник наблюдений')
        parser.add_argument('--noise', type=float, default=0.0,
                            help='СКО шума положения и габаритов для --perception noisy, м')
        parser.add_argument('--no-progress', action='store_true', help='Не показывать прогресс-бар')

    def handle(self, *args, **options):
        try:
            manifest = RunManifest(
                scenario=options['scenario'],
                method=options['method'],
                safety=parse_switch(options['safety']),
                seeds=parse_seeds(options['seeds']),
                out=options['out'],
                perception=options['perception'],
                noise=options['noise'],
            )
        except ValueError as exc:
            raise CommandError(str(exc)) from exc

        try:
            scenario = load_scenario(manifest.scenario)
        except ScenarioConfigError as exc:
            raise CommandError(str(exc)) from exc

        out = FileUtils.ensure_directory(manifest.out)
        progress = ProgressManager(enabled=not options['no_progress'], file=self.stdout)
        workers = max(1, options['workers'])

        self.stdout.write(self.style.SUCCESS(f"\n{'='*60}"))
        self.stdout.write(self.style.SUCCESS(f"🚗 Сценарий: {scenario.name} ({manifest.scenario})"))
        self.stdout.write(self.style.SUCCESS(f"   Метод: {manifest.method}, слой безопасности: {manifest.safety_label}"))
        self.stdout.write(self.style.SUCCESS(f"   Сиды: {', '.join(map(str, manifest.seeds))}"))
        self.stdout.write(self.style.SUCCESS(f"{'='*60}"))
        if manifest.perception == 'external':
            self.stdout.write(self.style.WARNING("⚠️  Внешняя модель восприятия: трассы не детерминированы"))

        FileUtils.write_json(out / 'manifest.json', manifest.to_record())
        outcomes, failures = self.execute_runs(manifest, workers, progress)

        for seed, exc in failures:
            self.stdout.write(self.style.ERROR(f"❌ Сид {seed}: {exc}"))

        episodes = episode_table(collect_episode_records(outcomes))
        write_table(episodes, out / 'episodes.csv')
        summary = aggregate_table(episodes, scenario.name, manifest.method, manifest.safety_label,
                                  len(manifest.seeds))
        write_table(summary, out / 'summary.csv')
        self.print_summary(summary.iloc[0].to_dict(), out)

        if failures:
            raise CommandError(f"Завершились с ошибкой {len(failures)} из {len(manifest.seeds)} прогонов")

    def execute_runs(self, manifest: RunManifest, workers: int, progress: ProgressManager):
        outcomes, failures = [], []
        with progress.task(f"{manifest.method}", total=len(manifest.seeds)) as bar:
            if workers == 1:
                for seed in manifest.seeds:
                    try:
                        outcomes.append(RUNNERS[manifest.method](manifest).run_seed(seed))
                    except Exception as exc:
                        logger.error(f"Прогон с сидом {seed} завершился с ошибкой", exc_info=True)
                        failures.append((seed, exc))
                    bar.update(1)
            else:
                with ProcessPoolExecutor(max_workers=workers, initializer=django.setup) as executor:
                    futures = {executor.submit(execute_seed, manifest, seed): seed for seed in manifest.seeds}
                    for future in as_completed(futures):
                        seed = futures[future]
                        try:
                            outcomes.append(future.result())
                        except Exception as exc:
                            logger.error(f"Прогон с сидом {seed} завершился с ошибкой", exc_info=True)
                            failures.append((seed, exc))
                        bar.update(1)
        for outcome in sorted(outcomes, key=lambda item: item.seed):
            progress.seed_done(outcome.seed, len(outcome.episodes), outcome.cycles, outcome.collisions)
        return outcomes, sorted(failures, key=lambda item: item[0])

    def print_summary(self, row, out):
        def fmt(value, unit=''):
            return '-' if value is None or value != value else f"{value:.3f}{unit}"

        self.stdout.write(self.style.SUCCESS(f"\n{'='*60}"))
        self.stdout.write(self.style.SUCCESS("📊 ИТОГОВАЯ СТАТИСТИКА"))
        self.stdout.write(self.style.SUCCESS(f"{'='*60}"))
        self.stdout.write(f"🚗 Эпизодов эго: {row['episodes']} (завершено {row['completed']})")
        self.stdout.write(f"⏱️  Среднее время проезда: {fmt(row['mean_travel_time'], ' с')}")
        self.stdout.write(f"📏 Средний временной интервал: {fmt(row['mean_time_headway'], ' с')}")
        self.stdout.write(f"⚠️  Опасных ситуаций на эпизод: {fmt(row['mean_dangerous_incidents'])}")
        self.stdout.write(f"🔄 Вызовов решателя: {row['solver_invocations']}, "
                          f"итераций на вызов: {fmt(row['mean_iterations'])}")
        if row['collisions']:
            self.stdout.write(self.style.ERROR(
                f"❌ Столкновений: {row['collisions']} (доля {fmt(row['collision_rate'])})"))
        else:
            self.stdout.write(self.style.SUCCESS("✅ Столкновений: 0"))
        self.stdout.write(f"📁 Результаты: {out}")
