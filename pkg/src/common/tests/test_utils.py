import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple

import numpy as np
from django.test import SimpleTestCase, override_settings

from common.utils import ConfigUtils, FileUtils, NumericUtils


@dataclass(frozen=True)
class SampleConfig:
    alpha: float = 1.0
    ladder: Tuple[float, ...] = (1.0,)


class ConfigUtilsTests(SimpleTestCase):

    @override_settings(VISIOPATH={'SAMPLE': {'alpha': 2.0, 'ladder': [1.0, 0.5]}})
    def test_build_from_section(self):
        config = ConfigUtils.build(SampleConfig, 'SAMPLE')
        self.assertEqual(config.alpha, 2.0)
        self.assertEqual(config.ladder, (1.0, 0.5))

    @override_settings(VISIOPATH={'SAMPLE': {'alpha': 2.0, 'beta': 3.0}})
    def test_unknown_key_is_skipped(self):
        with self.assertLogs('common.utils.config', level='WARNING'):
            config = ConfigUtils.build(SampleConfig, 'SAMPLE', alpha=5.0)
        self.assertEqual(config.alpha, 5.0)

    @override_settings(VISIOPATH={})
    def test_missing_section(self):
        self.assertEqual(ConfigUtils.section('SAMPLE'), {})
        self.assertEqual(ConfigUtils.build(SampleConfig, 'SAMPLE'), SampleConfig())

    def test_section_is_copy(self):
        section = ConfigUtils.section('SOLVER')
        section['bogus'] = 1
        self.assertNotIn('bogus', ConfigUtils.section('SOLVER'))


class FileUtilsTests(SimpleTestCase):

    def test_numpy_values_serialize(self):
        record = {'b': np.float64(1.5), 'a': np.arange(3), 'flag': np.bool_(True), 'n': np.int64(4)}
        self.assertEqual(FileUtils.dumps_record(record), '{"a": [0, 1, 2], "b": 1.5, "flag": true, "n": 4}')

    def test_jsonl(self):
        with tempfile.TemporaryDirectory() as tmp:
            directory = FileUtils.ensure_directory(Path(tmp) / 'nested' / 'dir')
            path = FileUtils.seed_file(directory, 'trace', 7, 'jsonl')
            self.assertEqual(path.name, 'trace_seed7.jsonl')
            with FileUtils.jsonl_writer(path) as write:
                write({'kind': 'run'})
                write({'kind': 'cycle', 'time': np.float64(0.1)})
            self.assertEqual(path.read_text(encoding='utf-8').count('\n'), 2)
            self.assertEqual(list(FileUtils.iter_jsonl(path))[1], {'kind': 'cycle', 'time': 0.1})


class NumericUtilsTests(SimpleTestCase):

    def test_all_finite(self):
        self.assertTrue(NumericUtils.all_finite(1.0, np.zeros(3), [1, 2]))
        self.assertFalse(NumericUtils.all_finite(1.0, float('nan')))
        self.assertFalse(NumericUtils.all_finite(np.array([0.0, np.inf])))

    def test_saturate(self):
        self.assertEqual(NumericUtils.saturate(5.0, -1.0, 1.0), 1.0)
        self.assertEqual(NumericUtils.saturate(-5.0, -1.0, 1.0), -1.0)
        self.assertEqual(NumericUtils.saturate(0.5, -1.0, 1.0), 0.5)
