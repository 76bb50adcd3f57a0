import os
from pathlib import Path
import shutil
import tempfile
import unittest

import numpy as np

from forgerynets.__main__ import EXIT_DATA, EXIT_OK, EXIT_USAGE, _overrides, dispatch, get_parser
from forgerynets.config import parse_config
from forgerynets.data import load_split
from forgerynets.datasets import read_dataset
from forgerynets.utils.logging import config_logging

HERE = os.path.dirname(__file__)
TEST_DATA_DIR = os.path.join(HERE, 'test_data')
TEST_CONFIGS_DIR = os.path.join(TEST_DATA_DIR, 'configs')
TINY_CONFIG = os.path.join(TEST_CONFIGS_DIR, 'tiny.ini')


class TestMain(unittest.TestCase):
    def setUp(self):
        self.tmp_output_dir = Path(tempfile.mkdtemp())

    def tearDown(self):
        # closes the run.log handler before the directory goes away
        config_logging()
        shutil.rmtree(self.tmp_output_dir)

    def gen_data(self, name='train.alds', *flags):
        out = self.tmp_output_dir.joinpath(name)
        code = dispatch(['gen-data', '--config', TINY_CONFIG, '--out', str(out),
                         '--n-real', '4', '--n-fake', '4', '--size', '16', *flags])
        self.assertEqual(code, EXIT_OK)
        return out

    def test_usage_errors(self):
        self.assertEqual(dispatch([]), EXIT_USAGE)
        self.assertEqual(dispatch(['fly']), EXIT_USAGE)
        self.assertEqual(dispatch(['gradcheck', '--dims', 'huge']), EXIT_USAGE)
        self.assertEqual(dispatch(['train', '--config', os.path.join(TEST_CONFIGS_DIR, 'invalid_option.ini')]),
                         EXIT_USAGE)
        self.assertEqual(dispatch(['--help']), EXIT_OK)

    def test_gradcheck(self):
        for seed in ('0', '1'):
            with self.subTest(seed=seed):
                self.assertEqual(dispatch(['gradcheck', '--dims', 'tiny', '--seed', seed]), EXIT_OK)

    def test_seed_reaches_generated_splits(self):
        def test_images(*argv):
            args = get_parser().parse_args([*argv, '--config', TINY_CONFIG])
            config = parse_config(args.config, overrides=_overrides(args))
            samples = load_split(config.data, 'test', image_size=config.model.image_size)
            return config, np.stack([sample.image for sample in samples])

        for command in (['train'], ['eval'], ['ablate'], ['baseline', '--kind', 'late'], ['probe']):
            with self.subTest(command=command[0]):
                config, seed_3 = test_images(*command, '--seed', '3')
                self.assertEqual(config.data.seed, 3)
                self.assertEqual(config.train.seed, 3)
                _, again = test_images(*command, '--seed', '3')
                _, seed_4 = test_images(*command, '--seed', '4')
                np.testing.assert_array_equal(seed_3, again)
                self.assertFalse(np.array_equal(seed_3, seed_4))

    def test_gen_data_and_extract(self):
        out = self.gen_data('train.alds', '--families', 'UP,CB')
        samples = read_dataset(out)
        self.assertEqual(len(samples), 4 + 2 * 4)
        self.assertEqual(samples[0].image.shape, (3, 16, 16))

        planes = self.tmp_output_dir.joinpath('planes.alds')
        code = dispatch(['extract', '--config', TINY_CONFIG, '--data', str(out), '--out', str(planes)])
        self.assertEqual(code, EXIT_OK)
        extracted = read_dataset(planes)
        self.assertEqual(len(extracted), len(samples))
        self.assertEqual(extracted[0].image.shape, (9, 16, 16))
        self.assertEqual([sample.label for sample in extracted], [sample.label for sample in samples])

    def test_data_errors(self):
        out = self.gen_data()
        truncated = self.tmp_output_dir.joinpath('truncated.alds')
        truncated.write_bytes(out.read_bytes()[:-7])
        code = dispatch(['eval', '--config', TINY_CONFIG, '--data', str(truncated),
                         '--ckpt', str(self.tmp_output_dir.joinpath('phase2.ckpt'))])
        self.assertEqual(code, EXIT_DATA)

        code = dispatch(['eval', '--config', TINY_CONFIG, '--ckpt', str(self.tmp_output_dir.joinpath('nope.ckpt'))])
        self.assertEqual(code, EXIT_DATA)

    def test_phase2_needs_all_modalities(self):
        code = dispatch(['train', '--config', TINY_CONFIG, '--out', str(self.tmp_output_dir),
                         '--phase', '2', '--modality', 'srm'])
        self.assertEqual(code, EXIT_USAGE)

    def test_train_then_eval(self):
        for phase in ('1', '2'):
            code = dispatch(['train', '--config', TINY_CONFIG, '--out', str(self.tmp_output_dir), '--phase', phase])
            self.assertEqual(code, EXIT_OK, msg=phase)
        self.assertTrue(self.tmp_output_dir.joinpath('phase2.ckpt').is_file())
        self.assertTrue(self.tmp_output_dir.joinpath('config.ini').is_file())
        self.assertTrue(self.tmp_output_dir.joinpath('run.log').is_file())

        results = self.tmp_output_dir.joinpath('results')
        code = dispatch(['eval', '--config', TINY_CONFIG,
                         '--ckpt', str(self.tmp_output_dir.joinpath('phase2.ckpt')),
                         '--report', 'csv', '--distort', 'blur', '--out', str(results)])
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(results.joinpath('eval_blur.csv').is_file())


if __name__ == '__main__':
    unittest.main()
