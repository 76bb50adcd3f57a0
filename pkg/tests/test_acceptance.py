"""desk-scale runs on the full synthetic corpus, minutes on one CPU core.
Set FORGERYNETS_ACCEPTANCE=1 to run them"""
import os
from pathlib import Path
import shutil
import tempfile
import unittest

import attr
import pandas as pd

import forgerynets
from forgerynets.utils.general import replicate_save_path, replicate_seeds

HERE = os.path.dirname(__file__)
TEST_DATA_DIR = os.path.join(HERE, 'test_data')
TEST_CONFIGS_DIR = os.path.join(TEST_DATA_DIR, 'configs')

ACCEPTANCE = os.environ.get('FORGERYNETS_ACCEPTANCE') == '1'

UNSEEN = ['HF', 'CB']


def mixed_acc(df):
    """accuracy on the unseen families, each scored with every real sample, averaged"""
    df = df.set_index('family')
    return df.loc[UNSEEN, 'acc'].mean()


@unittest.skipUnless(ACCEPTANCE, 'set FORGERYNETS_ACCEPTANCE=1 to run desk-scale acceptance runs')
class TestAcceptance(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.tmp_output_dir = Path(tempfile.mkdtemp())
        cls.config = forgerynets.config.parse_config(
            os.path.join(TEST_CONFIGS_DIR, 'acceptance.ini'),
            overrides={'TRAIN': {'save_path': cls.tmp_output_dir}}
        )
        forgerynets.train(cls.config, phase=1, modality='all')
        cls.save_paths = forgerynets.train(cls.config, phase=2, modality='all')

    @classmethod
    def tearDownClass(cls):
        shutil.rmtree(cls.tmp_output_dir)

    def full_model_frames(self, distortion='none'):
        frames = []
        for save_path in self.save_paths:
            eval_config = attr.evolve(self.config.eval, ckpt_path=save_path.joinpath('phase2.ckpt'),
                                      distortion=distortion)
            metrics, _ = forgerynets.evaluate(attr.evolve(self.config, eval=eval_config))
            frames.append(metrics.to_frame())
        return frames

    def test_single_modalities_specialize(self):
        for save_path in self.save_paths:
            acc = pd.read_csv(save_path.joinpath('phase1_acc.csv')).set_index('modality')
            for modality, row in acc.iterrows():
                self.assertGreaterEqual(row['UP'], 0.90, msg=modality)
                self.assertLessEqual(row[UNSEEN].min(), 0.75, msg=modality)

    def test_fusion_gain(self):
        full = pd.Series([mixed_acc(df) for df in self.full_model_frames()]).median()
        single = pd.concat([pd.read_csv(path.joinpath('phase1_acc.csv')).set_index('modality')[UNSEEN].mean(axis=1)
                            for path in self.save_paths], axis=1).median(axis=1)
        self.assertGreaterEqual(full, single.max() - 0.02)

        late = forgerynets.baseline(self.config, 'late', results_path=self.tmp_output_dir.joinpath('late'))
        self.assertGreaterEqual(full, mixed_acc(late) - 0.02)

    def test_ablation_trend(self):
        df = forgerynets.ablate(self.config, results_path=self.tmp_output_dir.joinpath('ablation_results'))
        by_variant = {variant: mixed_acc(frame) for variant, frame in df.groupby('variant', sort=False)}
        full = by_variant.pop('full')
        for variant, acc in by_variant.items():
            self.assertGreaterEqual(full, acc - 0.03, msg=variant)
        self.assertTrue(self.tmp_output_dir.joinpath('ablation_results', 'ablation.csv').is_file())

    def test_robustness(self):
        config = attr.evolve(self.config, train=attr.evolve(self.config.train, augment=['blur', 'down', 'jpeg'],
                                                            save_path=self.tmp_output_dir.joinpath('robust')))
        forgerynets.train(config, phase=1, modality='all')
        save_paths = forgerynets.train(config, phase=2, modality='all')
        self.assertEqual(save_paths, [replicate_save_path(config.train.save_path, seed, config.train.replicates)
                                      for seed in replicate_seeds(config.train.seed, config.train.replicates)])

        def median_acc(distortion):
            accs = []
            for save_path in save_paths:
                eval_config = attr.evolve(config.eval, ckpt_path=save_path.joinpath('phase2.ckpt'),
                                          distortion=distortion)
                metrics, _ = forgerynets.evaluate(attr.evolve(config, eval=eval_config))
                accs.append(metrics.acc)
            return pd.Series(accs).median()

        clean = median_acc('none')
        for distortion in ('blur', 'down', 'jpeg'):
            self.assertGreaterEqual(median_acc(distortion), clean - 0.15, msg=distortion)


if __name__ == '__main__':
    unittest.main()
