import os
from pathlib import Path
import shutil
import tempfile
import unittest

import attr
import pandas as pd
import torch

import forgerynets
from forgerynets.ablate import ablation_variants, kinds_sweep_variants, parse_disable
from forgerynets.analysis import feature_dump_to_df
from forgerynets.checkpoint import load_checkpoint
from forgerynets.data import load_split, make_dataset
from forgerynets.engine import AbstractTrainer, ExpertTrainer, FusionTrainer
from forgerynets.errors import ConfigurationError, NumericalError
from forgerynets.extractors import check_bayar
from forgerynets.nets import ForgeryDetector
from forgerynets.train import build_detector

HERE = os.path.dirname(__file__)
TEST_DATA_DIR = os.path.join(HERE, 'test_data')
TEST_CONFIGS_DIR = os.path.join(TEST_DATA_DIR, 'configs')


class NanTrainer(AbstractTrainer):
    def compute_loss(self, batch):
        return torch.tensor(float('nan'))


class TestTrain(unittest.TestCase):
    def setUp(self):
        self.tmp_output_dir = Path(tempfile.mkdtemp())
        self.config = forgerynets.config.parse_config(
            os.path.join(TEST_CONFIGS_DIR, 'tiny.ini'),
            overrides={'TRAIN': {'save_path': self.tmp_output_dir}}
        )

    def tearDown(self):
        shutil.rmtree(self.tmp_output_dir)

    def with_train(self, **kwargs):
        return attr.evolve(self.config, train=attr.evolve(self.config.train, **kwargs))

    def trainset(self):
        samples = load_split(self.config.data, 'train', image_size=self.config.model.image_size)
        return samples, make_dataset(samples, 'train', self.config.data, align=self.config.model.npr_factor)

    def test_zero_learning_rate_leaves_parameters_unchanged(self):
        samples, trainset = self.trainset()
        model = build_detector(self.config.model, samples)
        before = {name: tensor.clone() for name, tensor in model.state_dict().items()}
        config = self.with_train(learning_rate=0.)
        trainer = ExpertTrainer.from_config(model, 'srm', trainset, self.tmp_output_dir, config.train)
        losses = trainer.train()
        self.assertEqual(len(losses), 1)
        for name, tensor in model.state_dict().items():
            self.assertTrue(torch.equal(tensor, before[name]), msg=name)

        fragment = load_checkpoint(self.tmp_output_dir.joinpath('phase1_srm.ckpt'))
        prefixes = model.fragment_prefixes('srm')
        self.assertTrue(fragment)
        self.assertTrue(all(name.startswith(prefixes) for name in fragment))

    def test_bayar_kernel_stays_constrained(self):
        model_config = attr.evolve(self.config.model, kinds=['image', 'bayar'])
        samples, trainset = self.trainset()
        model = build_detector(model_config, samples)
        before = model.extractor.bayar_kernel.detach().clone()
        trainer = ExpertTrainer.from_config(model, 'bayar', trainset, self.tmp_output_dir, self.config.train)
        trainer.train()

        kernel = model.extractor.bayar_kernel
        check_bayar(kernel)
        self.assertFalse(torch.equal(kernel.detach(), before))
        fragment = load_checkpoint(self.tmp_output_dir.joinpath('phase1_bayar.ckpt'))
        check_bayar(fragment['extractor.bayar_kernel'])

    def test_phase1_then_phase2(self):
        save_paths = forgerynets.train(self.config, phase=1, modality='all')
        self.assertEqual(save_paths, [self.tmp_output_dir])
        for target in ('image', 'srm', 'npr', 'encoder'):
            self.assertTrue(self.tmp_output_dir.joinpath(f'phase1_{target}.ckpt').is_file(), msg=target)
        acc = pd.read_csv(self.tmp_output_dir.joinpath('phase1_acc.csv'))
        self.assertEqual(list(acc['modality']), ['image', 'srm', 'npr'])
        self.assertEqual(list(acc.columns), ['modality', 'ALL', 'NONE', 'UP', 'HF', 'CB'])

        forgerynets.train(self.config, phase=2, modality='all')
        state = load_checkpoint(self.tmp_output_dir.joinpath('phase2.ckpt'))
        fresh = ForgeryDetector.from_config(self.config.model).state_dict()
        self.assertEqual(set(state), set(fresh))
        base = [name for name in state if name.startswith('backbone.base.')]
        self.assertTrue(base)
        for name in base:
            self.assertTrue(torch.equal(state[name], fresh[name]), msg=name)

        # phase 2 does not train the patch embeddings loaded from phase 1
        fragment = load_checkpoint(self.tmp_output_dir.joinpath('phase1_npr.ckpt'))
        for name, tensor in fragment.items():
            if name.startswith('backbone.embed.'):
                self.assertTrue(torch.equal(state[name], tensor), msg=name)

        metrics, report_path = forgerynets.evaluate(self.config)
        self.assertEqual(metrics.n_samples, 6 + 3 * 4)
        self.assertEqual(set(metrics.per_family), {'NONE', 'UP', 'HF', 'CB'})
        self.assertEqual(report_path, self.tmp_output_dir.joinpath('eval_none.txt'))
        self.assertTrue(report_path.is_file())

        again, _ = forgerynets.evaluate(self.config)
        self.assertEqual(metrics.acc, again.acc)
        self.assertEqual(metrics.ap, again.ap)

        dump = self.tmp_output_dir.joinpath('features.joblib')
        eval_config = attr.evolve(self.config.eval, report='csv', distortion='jpeg', dump_features=dump)
        _, report_path = forgerynets.evaluate(attr.evolve(self.config, eval=eval_config))
        self.assertEqual(report_path.name, 'eval_jpeg.csv')
        df = feature_dump_to_df(dump)
        self.assertEqual(len(df), 18)
        self.assertEqual([column for column in df.columns if column.startswith('p_')],
                         ['p_image', 'p_srm', 'p_npr'])

    def test_phase2_needs_every_fragment(self):
        samples, trainset = self.trainset()
        model = build_detector(self.config.model, samples)
        with self.assertRaises(ConfigurationError) as cm:
            FusionTrainer.from_config(model, trainset, self.tmp_output_dir, self.config.train)
        self.assertIn('image', str(cm.exception))

    def test_phase2_trains_all_modalities(self):
        with self.assertRaises(ConfigurationError):
            forgerynets.train(self.config, phase=2, modality='srm')

    def test_resume_needs_single_modality(self):
        config = self.with_train(resume=self.tmp_output_dir.joinpath('phase1_srm.ckpt'))
        with self.assertRaises(ConfigurationError):
            forgerynets.train(config, phase=1, modality='all')

    def test_replicates(self):
        config = self.with_train(replicates=2)
        save_paths = forgerynets.train(config, phase=1, modality='image')
        self.assertEqual(save_paths, [self.tmp_output_dir.joinpath('replicate_0'),
                                      self.tmp_output_dir.joinpath('replicate_1')])
        for save_path in save_paths:
            self.assertTrue(save_path.joinpath('phase1_image.ckpt').is_file())

    def test_non_finite_loss_raises(self):
        samples, trainset = self.trainset()
        model = build_detector(self.config.model, samples)
        model.set_phase(1, 'image')
        trainer = NanTrainer(model=model, trainset=trainset, save_path=self.tmp_output_dir,
                             ckpt_path=self.tmp_output_dir.joinpath('nan.ckpt'), epochs=1, batch_size=8)
        with self.assertRaises(NumericalError):
            trainer.train()
        self.assertFalse(self.tmp_output_dir.joinpath('nan.ckpt').exists())

    def test_nothing_to_train_raises(self):
        samples, trainset = self.trainset()
        model = build_detector(self.config.model, samples)
        model.requires_grad_(False)
        with self.assertRaises(ConfigurationError):
            NanTrainer(model=model, trainset=trainset, save_path=self.tmp_output_dir,
                       ckpt_path=self.tmp_output_dir.joinpath('nan.ckpt'))

    def test_baselines(self):
        for kind in ('early', 'late'):
            df = forgerynets.baseline(self.config, kind)
            self.assertEqual(list(df['family']), ['ALL', 'NONE', 'UP', 'HF', 'CB'], msg=kind)
            self.assertTrue(self.tmp_output_dir.joinpath(f'baseline_{kind}.csv').is_file())
            self.assertTrue(self.tmp_output_dir.joinpath(f'{kind}.ckpt').is_file())
        # late fusion trained only the stream fragments it needs
        self.assertFalse(self.tmp_output_dir.joinpath('phase1_encoder.ckpt').exists())
        with self.assertRaises(ConfigurationError):
            forgerynets.baseline(self.config, 'middle')

    def test_ablate(self):
        df = forgerynets.ablate(self.config, replicates=1)
        self.assertEqual(list(df['variant'].unique()), ['full', '-le', '-cla', '-liia', '-dfs'])
        self.assertTrue(self.tmp_output_dir.joinpath('ablation.csv').is_file())
        replicates = pd.read_csv(self.tmp_output_dir.joinpath('ablation_replicates.csv'))
        self.assertEqual(set(replicates['seed']), {0})


class TestAblationVariants(unittest.TestCase):
    def setUp(self):
        self.model_config = forgerynets.config.parse_config(os.path.join(TEST_CONFIGS_DIR, 'tiny.ini')).model

    def test_components(self):
        variants = ablation_variants(self.model_config, disable=['le,cla'])
        self.assertEqual(list(variants), ['full', '-le', '-cla', '-liia', '-dfs', '-le-cla'])
        self.assertTrue(variants['full'].use_router)
        self.assertFalse(variants['-dfs'].use_router)
        self.assertFalse(variants['-le-cla'].use_lora)
        self.assertFalse(variants['-le-cla'].use_cross_attention)
        self.assertTrue(variants['-le-cla'].use_adapter)

    def test_parse_disable(self):
        self.assertEqual(parse_disable(' LE, liia '), ('le', 'liia'))
        with self.assertRaises(ConfigurationError):
            parse_disable('le,moe')

    def test_kinds_sweep(self):
        variants = kinds_sweep_variants(self.model_config)
        self.assertEqual(list(variants), ['image', 'image+srm', 'image+srm+npr'])
        self.assertEqual(variants['image+srm'].kinds, ['image', 'srm'])


if __name__ == '__main__':
    unittest.main()
