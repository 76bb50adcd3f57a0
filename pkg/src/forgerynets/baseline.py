"""train and evaluate the two simple fusion baselines"""
import logging

import attr
import pandas as pd

from .core import seed_everything
from .data import load_split, make_dataset
from .engine import FusionTrainer
from .errors import ConfigurationError
from .evaluate import evaluate_model
from .nets import EarlyFusionNet, late_fusion_config
from .train import build_detector, prepare_model, train_phase1
from .utils.general import make_save_path, phase1_ckpt_path, replicate_save_path, replicate_seeds
from .utils.metrics import median_frame

logger = logging.getLogger(__name__)

BASELINES = ('early', 'late')


def run_baseline(config, kind, save_path, train_samples, test_samples):
    """train one baseline with ``config.train.seed`` and evaluate it

    The late-fusion baseline reuses the phase-1 fragments under ``save_path``;
    missing fragments are trained first with the full model configuration.

    Returns
    -------
    metrics : forgerynets.utils.metrics.Metrics
    """
    trainset = make_dataset(train_samples, 'train', config.data,
                            align=config.model.npr_factor,
                            augment=config.train.augment)
    if kind == 'early':
        seed_everything(config.train.seed)
        model = prepare_model(EarlyFusionNet.from_config(config.model), config.model, train_samples)
        trainer = FusionTrainer.early_fusion(model, trainset, save_path, config.train)
    elif kind == 'late':
        model_config = late_fusion_config(config.model)
        needed = build_detector(model_config).phase1_targets()
        missing = [target for target in needed if not phase1_ckpt_path(save_path, target).is_file()]
        if missing:
            logger.info('late fusion: training missing phase-1 fragments %s', missing)
            train_phase1(config, save_path, train_samples, modality=missing)
        seed_everything(config.train.seed)
        model = build_detector(model_config, train_samples)
        trainer = FusionTrainer.late_fusion(model, trainset, save_path, config.train, phase1_path=save_path)
    else:
        raise ConfigurationError(f'invalid baseline: {kind}. Must be one of {BASELINES}')
    trainer.train()
    return evaluate_model(model, config, test_samples)


def baseline(config, kind, results_path=None):
    """train and evaluate a fusion baseline once per replicate

    Parameters
    ----------
    config : forgerynets.config.Config
    kind : str
        one of {'early', 'late'}
    results_path : Path
        where ``baseline_{kind}.csv`` (median over replicates) and
        ``baseline_{kind}_replicates.csv`` are written. Default is ``[TRAIN] SAVE_PATH``.

    Returns
    -------
    df : pandas.DataFrame
        median metrics per family
    """
    if kind not in BASELINES:
        raise ConfigurationError(f'invalid baseline: {kind}. Must be one of {BASELINES}')
    train_samples = load_split(config.data, 'train', image_size=config.model.image_size)
    test_samples = load_split(config.data, 'test', image_size=config.model.image_size)

    seeds = replicate_seeds(config.train.seed, config.train.replicates)
    frames = []
    for seed in seeds:
        save_path = replicate_save_path(config.train.save_path, seed, len(seeds))
        replicate_config = attr.evolve(config, train=attr.evolve(config.train, seed=seed))
        metrics = run_baseline(replicate_config, kind, save_path, train_samples, test_samples)
        df = metrics.to_frame()
        df.insert(0, 'seed', seed)
        frames.append(df)

    results_path = make_save_path(results_path or config.train.save_path)
    median = median_frame([df.drop(columns='seed') for df in frames])
    median.to_csv(results_path.joinpath(f'baseline_{kind}.csv'), index=False)
    pd.concat(frames, ignore_index=True).to_csv(results_path.joinpath(f'baseline_{kind}_replicates.csv'), index=False)
    logger.info('%s-fusion baseline, median over %d replicates:\n%s',
                kind, len(seeds), median.to_string(index=False))
    return median
