import os
from pathlib import Path
import shutil
import tempfile
import unittest

import forgerynets
from forgerynets.config import parse_config
from forgerynets.errors import ConfigurationError

HERE = os.path.dirname(__file__)
TEST_DATA_DIR = os.path.join(HERE, 'test_data')
TEST_CONFIGS_DIR = os.path.join(TEST_DATA_DIR, 'configs')
TINY_CONFIG = os.path.join(TEST_CONFIGS_DIR, 'tiny.ini')


class TestParseConfig(unittest.TestCase):
    def setUp(self):
        self.tmp_output_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp_output_dir)

    def write_config(self, text):
        path = os.path.join(self.tmp_output_dir, 'config.ini')
        with open(path, 'w') as fp:
            fp.write(text)
        return path

    def test_tiny(self):
        config = parse_config(TINY_CONFIG)
        self.assertIsInstance(config, forgerynets.config.Config)
        self.assertEqual(config.data.families, ['UP'])
        self.assertEqual(config.data.test_families, ['UP', 'HF', 'CB'])
        self.assertEqual(config.data.crop_size, 12)
        self.assertEqual(config.model.kinds, ['image', 'srm', 'npr'])
        self.assertEqual(config.model.adapter_channels, [4, 8])
        self.assertEqual(config.model.lora_alpha, 4.0)
        self.assertIsNone(config.model.fusion_layers)
        self.assertEqual(config.train.learning_rate, 1e-3)
        self.assertEqual(config.train.betas, [0.9, 0.999])
        self.assertEqual(config.eval.batch_size, 16)

    def test_defaults(self):
        config = parse_config()
        self.assertEqual(config.model.kinds, ['image', 'srm', 'npr', 'bayar'])
        self.assertEqual(config.train.moe_sign, 'literal')
        self.assertEqual(config.train.moe_lambda, 0.1)
        self.assertEqual(config.train.save_path, Path('results'))
        self.assertIsNone(config.data.train_path)

    def test_unknown_option(self):
        with self.assertRaises(ConfigurationError) as cm:
            parse_config(os.path.join(TEST_CONFIGS_DIR, 'invalid_option.ini'))
        self.assertIn('num_experts', str(cm.exception))

    def test_unknown_section(self):
        path = self.write_config('[OPTIMIZER]\nLR = 1\n')
        with self.assertRaises(ConfigurationError):
            parse_config(path)

    def test_missing_file(self):
        with self.assertRaises(FileNotFoundError):
            parse_config(os.path.join(self.tmp_output_dir, 'nope.ini'))

    def test_invalid_values(self):
        for text in ('[MODEL]\nEMBED_DIM = 8\nHEADS = 3\n',
                     '[MODEL]\nKINDS = srm, npr\n',
                     '[MODEL]\nFUSION_LAYERS = 0, 7\n',
                     '[TRAIN]\nMOE_SIGN = minus\n',
                     '[TRAIN]\nBATCH_SIZE = many\n',
                     '[DATA]\nFAMILIES = NONE\n',
                     '[EVAL]\nREPORT = html\n'):
            with self.assertRaises(ConfigurationError, msg=text):
                parse_config(self.write_config(text))

    def test_lists(self):
        path = self.write_config('[MODEL]\nFUSION_LAYERS = [1, 3]\n[TRAIN]\nBETAS = 0.5, 0.9\nAUGMENT = jpeg, blur\n')
        config = parse_config(path)
        self.assertEqual(config.model.fusion_layers, [1, 3])
        self.assertEqual(config.train.betas, [0.5, 0.9])
        self.assertEqual(config.train.augment, ['jpeg', 'blur'])

    def test_overrides_replace_file_values(self):
        config = parse_config(TINY_CONFIG, overrides={'TRAIN': {'epochs': 3, 'phase': 2, 'save_path': None},
                                                      'MODEL': {'kinds': ['image', 'npr']}})
        self.assertEqual(config.train.epochs, 3)
        self.assertEqual(config.train.phase, 2)
        self.assertEqual(config.train.save_path, Path('results'))
        self.assertEqual(config.model.kinds, ['image', 'npr'])
        with self.assertRaises(ConfigurationError):
            parse_config(TINY_CONFIG, overrides={'LOGGING': {'level': 'INFO'}})

    def test_to_ini_round_trip(self):
        config = parse_config(TINY_CONFIG, overrides={'TRAIN': {'augment': ['jpeg']},
                                                      'EVAL': {'dump_features': 'features.joblib'}})
        path = self.write_config(config.to_ini())
        self.assertEqual(parse_config(path), config)


if __name__ == '__main__':
    unittest.main()
