from hypnav.ExperimentConfig import ExperimentConfig, sidecar_path
from hypnav.errors import ConfigError
from hypnav.sim.ScenarioConfig import ScenarioConfig
import json
import os
import tempfile
import unittest
import logging

logging.basicConfig(level=logging.WARNING)
logger = logging.getLogger(__name__)

CONF_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'conf')


class ExperimentConfigTestCase(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def write(self, text, name='experiment.json'):
        path = os.path.join(self.tmp.name, name)
        with open(path, 'w') as handle:
            handle.write(text)
        return path

    def test_defaults(self):
        config = ExperimentConfig.from_dict({})
        self.assertEqual(config.scenario.kind, 'simple-circle')
        self.assertEqual(config.scenario.humans, 5)
        self.assertEqual(config.training.episodes, 10000)
        self.assertEqual(config.training.lr, 1e-3)
        self.assertEqual(config.policy.embed_dim, 2)

    def test_example_files_load(self):
        for name in ('example_conf.json', 'desk_conf.json'):
            config = ExperimentConfig.load(os.path.join(CONF_DIR, name))
            self.assertEqual(config.policy.embed_dim, config.curiosity.embed_dim)
        self.assertEqual(ExperimentConfig.load(os.path.join(CONF_DIR, 'desk_conf.json'))
                         .training.episodes, 5000)

    def test_unknown_key(self):
        with self.assertRaises(ConfigError) as context:
            ExperimentConfig.from_dict({'scenario': {'kind': 'simple-circle', 'walls': 2}})
        self.assertIn('walls', str(context.exception))
        with self.assertRaises(ConfigError):
            ExperimentConfig.from_dict({'rendering': {}})

    def test_type_errors_name_the_field(self):
        with self.assertRaises(ConfigError) as context:
            ExperimentConfig.from_dict({'scenario': {'time_step': 'fast'}})
        self.assertIn('scenario.time_step', str(context.exception))
        with self.assertRaises(ConfigError):
            ExperimentConfig.from_dict({'training': {'episodes': 1.5}})
        with self.assertRaises(ConfigError):
            ExperimentConfig.from_dict({'curiosity': {'enabled': 1}})

    def test_coercion(self):
        config = ExperimentConfig.from_dict({'scenario': {'time_limit': 20, 'n_humans': None},
                                             'policy': {'robot_phi_hidden': [64]}})
        self.assertIsInstance(config.scenario.time_limit, float)
        self.assertIsNone(config.scenario.n_humans)
        self.assertEqual(config.policy.robot_phi_hidden, (64,))

    def test_dimension_mismatch(self):
        with self.assertRaises(ConfigError) as context:
            ExperimentConfig.from_dict({'policy': {'embed_dim': 128},
                                        'curiosity': {'embed_dim': 2}})
        self.assertIn('128', str(context.exception))

    def test_invalid_values(self):
        with self.assertRaises(ConfigError):
            ExperimentConfig.from_dict({'training': {'gamma': 1.0}})
        with self.assertRaises(ConfigError):
            ExperimentConfig.from_dict({'scenario': {'kind': 'empty', 'n_humans': 3}})
        with self.assertRaises(ConfigError):
            ScenarioConfig(goal_reward='shaped').validate()

    def test_json_error_position(self):
        path = self.write('{\n  "scenario": {\n    "kind": "simple-circle",\n  }\n}\n')
        with self.assertRaises(ConfigError) as context:
            ExperimentConfig.load(path)
        self.assertIn('line 4', str(context.exception))

    def test_missing_file(self):
        with self.assertRaises(FileNotFoundError):
            ExperimentConfig.load(os.path.join(self.tmp.name, 'absent.json'))

    def test_round_trip(self):
        config = ExperimentConfig.from_dict({'scenario': {'kind': 'complex-square'},
                                             'policy': {'embed_dim': 128},
                                             'curiosity': {'embed_dim': 128, 'eta': 0.05},
                                             'output_dir': 'runs/x'})
        self.assertEqual(ExperimentConfig.from_dict(config.to_dict()), config)
        path = sidecar_path(os.path.join(self.tmp.name, 'best.npz'))
        self.assertTrue(path.endswith('best.npz.json'))
        config.save(path)
        self.assertEqual(ExperimentConfig.load(path), config)
        with open(path) as handle:
            self.assertEqual(json.load(handle)['policy']['robot_phi_hidden'], [150, 150])


if __name__ == '__main__':
    unittest.main()
