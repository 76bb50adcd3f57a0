"""run phase 1 and phase 2 of training from a Config"""
import logging

import attr
import pandas as pd

from .checkpoint import load_model
from .core import seed_everything
from .data import fit_extractor, load_split, make_dataset
from .engine import EncoderTrainer, ExpertTrainer, FusionTrainer, Tester
from .engine.fusion_trainer import BASE_PREFIX
from .errors import ConfigurationError
from .nets import ENCODER, ForgeryDetector
from .tensorboard import logdir2csv
from .utils.general import replicate_save_path, replicate_seeds

logger = logging.getLogger(__name__)

PHASE1_ACC_CSV = 'phase1_acc.csv'


def prepare_model(model, model_config, train_samples=None):
    """load the base weights of ``base_weights_path`` if given, and fit
    standardization on ``train_samples`` if given"""
    if model_config.base_weights_path is not None:
        load_model(model, model_config.base_weights_path, strict=False, prefixes=(BASE_PREFIX,))
        logger.info('loaded base weights from %s', model_config.base_weights_path)
    if train_samples is not None:
        fit_extractor(model.extractor, train_samples)
    return model


def build_detector(model_config, train_samples=None):
    """ForgeryDetector from the [MODEL] section, prepared by ``prepare_model``"""
    return prepare_model(ForgeryDetector.from_config(model_config), model_config, train_samples)


def _trainset(config, train_samples):
    return make_dataset(train_samples, 'train', config.data,
                        align=config.model.npr_factor,
                        augment=config.train.augment)


def _testset(config, test_samples, distortion=None):
    return make_dataset(test_samples, 'test', config.data,
                        align=config.model.npr_factor,
                        distortion=distortion)


def _summaries_to_csv(trainer):
    if trainer.train_writer is not None:
        logdir2csv(trainer.save_path.joinpath('train'))


def train_phase1(config, save_path, train_samples, test_samples=None, modality='all'):
    """train the phase-1 fragments

    Each target starts from a freshly built detector with the same seed, so a
    fragment does not depend on which other targets are trained in the same run.

    Parameters
    ----------
    config : forgerynets.config.Config
    save_path : Path
        fragments are saved here as ``phase1_{modality}.ckpt``
    train_samples : list
    test_samples : list
        if given, every stream is evaluated on its own and a modality x family
        accuracy table is saved as ``phase1_acc.csv``
    modality : str, list
        a stream name, 'encoder', 'all', or a list of them

    Returns
    -------
    df : pandas.DataFrame
        one row per evaluated stream, None without ``test_samples``
    """
    if isinstance(modality, str):
        modality = [modality]
    probe = ForgeryDetector.from_config(config.model)
    if 'all' in modality:
        targets = probe.phase1_targets()
    else:
        targets = [probe.streams[probe.stream_index(target)] if target != ENCODER else ENCODER
                   for target in modality]
    if config.train.resume is not None and len(targets) > 1:
        raise ConfigurationError(
            f'resuming phase 1 needs a single modality, the checkpoint cannot belong to all of {targets}'
        )

    records = []
    for target in targets:
        logger.info('phase 1: training %s', target)
        seed_everything(config.train.seed)
        model = build_detector(config.model, train_samples)
        trainset = _trainset(config, train_samples)
        if target == ENCODER:
            trainer = EncoderTrainer.from_config(model, trainset, save_path, config.train)
        else:
            trainer = ExpertTrainer.from_config(model, target, trainset, save_path, config.train)
        if config.train.resume is not None:
            trainer.resume(config.train.resume)
        trainer.train()
        _summaries_to_csv(trainer)

        if test_samples is not None and target != ENCODER:
            tester = Tester(model, _testset(config, test_samples),
                            batch_size=config.eval.batch_size,
                            device=config.train.device,
                            modality=target)
            metrics = tester.test()
            row = {'modality': target, 'ALL': metrics.acc}
            row.update({family: values['acc'] for family, values in metrics.per_family.items()})
            records.append(row)

    if not records:
        return None
    df = pd.DataFrame.from_records(records)
    df.to_csv(save_path.joinpath(PHASE1_ACC_CSV), index=False)
    logger.info('phase-1 accuracy by modality and family:\n%s', df.to_string(index=False))
    return df


def train_phase2(config, save_path, train_samples):
    """load the phase-1 fragments under ``save_path`` and train the fusion modules

    Returns
    -------
    model : ForgeryDetector
        trained, also saved as ``save_path/phase2.ckpt``
    """
    seed_everything(config.train.seed)
    model = build_detector(config.model, train_samples)
    trainer = FusionTrainer.from_config(model, _trainset(config, train_samples), save_path, config.train)
    if config.train.resume is not None:
        trainer.resume(config.train.resume)
    trainer.train()
    _summaries_to_csv(trainer)
    return model


def train_full(config, save_path, train_samples, test_samples=None):
    """phase 1 on every target, then phase 2. Returns the trained model"""
    train_phase1(config, save_path, train_samples, test_samples, modality='all')
    return train_phase2(config, save_path, train_samples)


def train(config, phase=None, modality=None):
    """train detectors as specified by ``config``, one per replicate

    Parameters
    ----------
    config : forgerynets.config.Config
    phase : int
        overrides ``config.train.phase``
    modality : str
        overrides ``config.train.modality``

    Returns
    -------
    save_paths : list
        directory of each replicate
    """
    phase = config.train.phase if phase is None else phase
    modality = config.train.modality if modality is None else modality
    if phase == 2 and modality != 'all':
        raise ConfigurationError(f'phase 2 trains every modality together, modality must be "all", got {modality}')

    train_samples = load_split(config.data, 'train', image_size=config.model.image_size)
    test_samples = None
    if phase == 1:
        test_samples = load_split(config.data, 'test', image_size=config.model.image_size)

    seeds = replicate_seeds(config.train.seed, config.train.replicates)
    save_paths = []
    for seed in seeds:
        save_path = replicate_save_path(config.train.save_path, seed, len(seeds))
        replicate_config = attr.evolve(config, train=attr.evolve(config.train, seed=seed))
        logger.info('training phase %d with seed %d, saving in %s', phase, seed, save_path)
        if phase == 1:
            train_phase1(replicate_config, save_path, train_samples, test_samples, modality=modality)
        else:
            train_phase2(replicate_config, save_path, train_samples)
        save_paths.append(save_path)
    return save_paths
