import os
from pathlib import Path
import shutil
import tempfile
import unittest

import attr

import forgerynets
from forgerynets.errors import DataError
from forgerynets.tensorboard import logdir2csv, logdir2df

HERE = os.path.dirname(__file__)
TEST_DATA_DIR = os.path.join(HERE, 'test_data')
TEST_CONFIGS_DIR = os.path.join(TEST_DATA_DIR, 'configs')


class TestTensorboard(unittest.TestCase):
    def setUp(self):
        self.tmp_output_dir = Path(tempfile.mkdtemp())

    def tearDown(self):
        shutil.rmtree(self.tmp_output_dir)

    def test_summaries_of_training(self):
        config = forgerynets.config.parse_config(
            os.path.join(TEST_CONFIGS_DIR, 'tiny.ini'),
            overrides={'TRAIN': {'save_path': self.tmp_output_dir, 'summary_step': 1}}
        )
        forgerynets.train(config, phase=1, modality='image')
        logdir = self.tmp_output_dir.joinpath('image', 'train')
        self.assertTrue(list(logdir.glob('*tfevents*')))

        df = logdir2df(logdir)
        self.assertIn('loss/train', df.columns)
        # 16 training samples in batches of 8
        self.assertEqual(list(df.index), [1, 2])

        csv_files = list(logdir.glob('*.csv'))
        self.assertEqual(len(csv_files), 1)
        self.assertEqual(logdir2csv(logdir), csv_files[0])

    def test_no_events(self):
        with self.assertRaises(DataError):
            logdir2csv(self.tmp_output_dir)


if __name__ == '__main__':
    unittest.main()
