"""
Базовый класс для всех методов планирования стенда
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from common.utils import FileUtils
from perception.providers import BackgroundProvider, BaseProvider, build_provider
from perception.types import PerceptionConfig
from planner.mpc import MpcController
from planner.mpc.controller import ReferenceSource
from traffic.episode import EpisodeRunner
from traffic.scenario import ScenarioConfig, load_scenario
from ..utils.manifest import RunManifest

logger = logging.getLogger(__name__)


@dataclass
class SeedOutcome:
    """Итог одного прогона (передается из рабочего процесса)"""

    seed: int
    trace_path: str
    metrics_path: str
    episodes: List[Dict[str, Any]] = field(default_factory=list)
    cycles: int = 0

    @property
    def collisions(self) -> int:
        return sum(1 for episode in self.episodes if episode['collision'])


class BaseRunner:
    """Базовый класс для всех методов"""

    method = None

    def __init__(self, manifest: RunManifest):
        self.manifest = manifest

    def controller_options(self) -> Dict[str, Any]:
        """Должен быть переопределен в дочерних классах"""
        raise NotImplementedError

    def reference_source(self, provider: BaseProvider) -> Optional[ReferenceSource]:
        return None

    def build_controller(self, scenario: ScenarioConfig, provider: BaseProvider) -> MpcController:
        options = self.controller_options()
        return MpcController.from_settings(reference_source=self.reference_source(provider),
                                           road=scenario.road, safety_gate=self.manifest.safety, **options)

    def build_provider(self, scenario: ScenarioConfig, seed: int) -> BaseProvider:
        config = PerceptionConfig.from_settings()
        source = self.manifest.perception
        if source == 'noisy':
            return build_provider(source, seed=seed, sigma_pos=self.manifest.noise,
                                  sigma_dim=self.manifest.noise, config=config, road=scenario.road)
        provider = build_provider(source, config=config, road=scenario.road)
        if source == 'external':
            return BackgroundProvider(provider)
        return provider

    def run_seed(self, seed: int) -> SeedOutcome:
        """
        Прогон сценария с одним сидом: трасса пишется построчно,
        сводка метрик - отдельным файлом.
        """
        manifest = self.manifest
        scenario = load_scenario(manifest.scenario)
        out = FileUtils.ensure_directory(manifest.out)
        trace_path = FileUtils.seed_file(out, 'trace', seed, 'jsonl')
        metrics_path = FileUtils.seed_file(out, 'metrics', seed, 'json')

        provider = self.build_provider(scenario, seed)
        controller = self.build_controller(scenario, provider)
        try:
            with FileUtils.jsonl_writer(trace_path) as sink:
                runner = EpisodeRunner(scenario, controller, provider, seed, method=self.method,
                                       safety=manifest.safety, sink=sink, keep_details=False)
                result = runner.run()
        finally:
            if isinstance(provider, BackgroundProvider):
                provider.close()

        episodes = [{'seed': seed, 'status': episode.status, **episode.metrics.to_record()}
                    for episode in result.episodes]
        FileUtils.write_json(metrics_path, {
            'scenario': scenario.name,
            'method': self.method,
            'safety': manifest.safety_label,
            'seed': seed,
            'episodes': episodes,
        })
        cycles = sum(1 for record in result.records if record['kind'] == 'cycle')
        logger.info(f"{self.method}, сид {seed}: {len(episodes)} эпизодов, {cycles} циклов")
        return SeedOutcome(seed=seed, trace_path=str(trace_path), metrics_path=str(metrics_path),
                           episodes=episodes, cycles=cycles)
