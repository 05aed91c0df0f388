import json
import os
import tempfile
import unittest

from rankone.errors import ConfigError, UnknownFamily, UnknownOperation
from rankone.experiment import OPERATIONS, ExperimentConfig, level_set, run, run_dict
from rankone.families import preset


def correlation(**extra):
    config = {
        'schedule': {'family': 'chacon'},
        'operation': 'correlation',
        'params': {'A': '4:base', 'lags': '1-20'},
        'tol': '1/1000000',
    }
    config.update(extra)
    return config


class TestConfig(unittest.TestCase):
    def test_operations_registered(self):
        for name in ('correlation', 'triple', 'weak-limit-fit', 'averaging-deviation', 'stat-lemma',
                     'tensor-closeness', 'staircase-anomaly', 'asymmetry', 'class-alpha', 'rigidity-scan',
                     'mixing-scan', 'spectral', 'triangular-distance', 'injectivity', 'total-measure'):
            self.assertIn(name, OPERATIONS)

    def test_unknown_keys(self):
        with self.assertRaises(ConfigError):
            ExperimentConfig.from_dict(correlation(colour='blue'))
        with self.assertRaises(ConfigError):
            ExperimentConfig.from_dict({'schedule': {'family': 'chacon'}})
        with self.assertRaises(ConfigError):
            ExperimentConfig.from_dict(['correlation'])

    def test_validate(self):
        with self.assertRaises(UnknownOperation):
            ExperimentConfig.from_dict(correlation(operation='entropy')).validate()
        with self.assertRaises(UnknownFamily):
            ExperimentConfig.from_dict(correlation(schedule={'family': 'chacon-2'})).validate()
        with self.assertRaises(ConfigError):
            ExperimentConfig.from_dict(correlation(schedule={'family': 'ornstein'})).validate()
        with self.assertRaises(ConfigError):
            ExperimentConfig.from_dict(correlation(output={'format': 'xml'})).validate()
        ExperimentConfig.from_dict(correlation(schedule={'family': 'ornstein'}, seed=4)).validate()

    def test_preset_schedule(self):
        config = ExperimentConfig.from_dict(correlation(schedule={'family': 'sidon-4', 'params': {'c': 8}}))
        resolved = config.resolved_schedule
        self.assertEqual(resolved['family'], 'sidon')
        self.assertEqual(resolved['params'], {'c': 8, 'r': 'j+2'})

    def test_hash_ignores_output_path(self):
        a = ExperimentConfig.from_dict(correlation(output={'path': 'a.json'}))
        b = ExperimentConfig.from_dict(correlation(output={'path': 'b.json'}))
        c = ExperimentConfig.from_dict(correlation(tol='1/1000'))
        self.assertEqual(a.hash, b.hash)
        self.assertNotEqual(a.hash, c.hash)

    def test_level_set(self):
        chacon = preset('chacon')
        self.assertEqual(level_set(chacon, '3:base').levels, (0,))
        self.assertEqual(level_set(chacon, '2:odd').levels, (0, 2))
        self.assertEqual(level_set(chacon, '3:1,4-5').levels, (1, 4, 5))
        self.assertEqual(level_set(chacon, {'stage': 2, 'levels': [2]}).levels, (2,))
        self.assertEqual(len(level_set(chacon, '3:full')), 7)
        with self.assertRaises(ConfigError):
            level_set(chacon, 'x:base')


class TestRun(unittest.TestCase):
    def test_deterministic(self):
        first = run_dict(correlation())
        second = run_dict(correlation())
        a, b = first.to_dict(), second.to_dict()
        a.pop('wall_time')
        b.pop('wall_time')
        self.assertEqual(a, b)
        self.assertEqual(first.series.values, second.series.values)
        self.assertEqual(first.exit_code, 0)

    def test_empty_lags(self):
        with self.assertRaises(ConfigError):
            run_dict(correlation(params={'A': '4:base', 'lags': ''}))

    def test_budget_exceeded(self):
        record = run_dict(correlation(params={'A': '4:base', 'lags': '20'}, max_extra_stages=0))
        self.assertEqual(record.exit_code, 3)
        self.assertEqual(record.exceeded, [20])
        self.assertTrue(record.to_dict()['budget_exceeded'])

    def test_json_output(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'chacon.json')
            record = run_dict(correlation(output={'path': path}))
            self.assertEqual(record.outputs, [path])
            with open(path) as f:
                document = json.load(f)
            self.assertEqual(document['record']['config_hash'], record.config_hash)
            self.assertEqual(document['config']['operation'], 'correlation')
            self.assertEqual(len(document['series']), 20)

    def test_csv_output(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'chacon.csv')
            record = run_dict(correlation(output={'path': path, 'format': 'csv', 'precision': 6}))
            self.assertEqual(sorted(os.listdir(tmp)), ['chacon.csv', 'chacon.json'])
            self.assertEqual(len(record.outputs), 2)
            with open(path) as f:
                lines = f.read().splitlines()
            self.assertEqual(lines[0], 'lag,lo,hi,exact')
            self.assertEqual(len(lines), 21)

    def test_without_schedule(self):
        config = ExperimentConfig.from_dict({'operation': 'injectivity'})
        self.assertEqual(config.schedule, {})
        self.assertEqual(config.to_dict(), {'operation': 'injectivity'})
        record = run(ExperimentConfig.from_dict({'operation': 'injectivity', 'params': {'below': 100}}))
        self.assertTrue(record.result['holds'])
        with self.assertRaises(ConfigError):
            run_dict({'operation': 'stat-lemma', 'params': {'r': 20, 'L': 2}})
        sample = run_dict({'operation': 'stat-lemma', 'seed': 3, 'params': {'r': 20, 'L': 2, 'trials': 5}})
        self.assertEqual(sample.result['sample'].trials, 5)

    def test_total_measure(self):
        record = run_dict({'schedule': {'family': 'odometer'}, 'operation': 'total-measure', 'params': {'J': 5}})
        self.assertTrue(record.result['measure'].exact)
        self.assertEqual(record.result['class'], 'finite')


if __name__ == '__main__':
    unittest.main()
