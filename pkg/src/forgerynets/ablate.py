"""component ablations and the sweep over combinations of low-level streams"""
import logging

import attr
import pandas as pd

from .data import load_split
from .errors import ConfigurationError
from .evaluate import evaluate_model
from .extractors import ExtractorKind, validate_kinds
from .train import train_full
from .utils.general import make_save_path, replicate_seeds
from .utils.metrics import median_frame

logger = logging.getLogger(__name__)

# short name of a model component -> the [MODEL] switch that removes it
COMPONENTS = {
    'le': 'use_lora',
    'cla': 'use_cross_attention',
    'liia': 'use_adapter',
    'dfs': 'use_router',
}

FULL = 'full'

ABLATION_CSV = 'ablation.csv'
ABLATION_REPLICATES_CSV = 'ablation_replicates.csv'


def parse_disable(value):
    """'le,cla' -> ('le', 'cla')"""
    if isinstance(value, str):
        value = value.split(',')
    components = tuple(component.strip().lower() for component in value if component.strip())
    unknown = [component for component in components if component not in COMPONENTS]
    if unknown:
        raise ConfigurationError(f'unknown component(s) to disable: {unknown}. Valid components are: {list(COMPONENTS)}')
    return components


def variant_name(disabled):
    return FULL if not disabled else '-' + '-'.join(disabled)


def ablation_variants(model_config, disable=None):
    """model configurations to compare: the full model, each single component off,
    then one combination per entry of ``disable``

    Returns
    -------
    variants : dict
        name -> ModelConfig
    """
    combinations = [()] + [(component,) for component in COMPONENTS]
    for value in disable or ():
        combinations.append(parse_disable(value))
    variants = {}
    for disabled in combinations:
        switches = {COMPONENTS[component]: False for component in disabled}
        variants[variant_name(disabled)] = attr.evolve(model_config, **switches)
    return variants


def kinds_sweep_variants(model_config):
    """one configuration per prefix of the low-level kinds: image; image + first; ..."""
    kinds = validate_kinds(model_config.kinds)
    lowlevel = [kind.value for kind in kinds if kind is not ExtractorKind.IMAGE]
    variants = {}
    for n_lowlevel in range(len(lowlevel) + 1):
        prefix = [ExtractorKind.IMAGE.value] + lowlevel[:n_lowlevel]
        variants['+'.join(prefix)] = attr.evolve(model_config, kinds=prefix)
    return variants


def ablate(config, disable=None, replicates=None, kinds_sweep=False, results_path=None):
    """train and evaluate every variant once per replicate, report medians

    Parameters
    ----------
    config : forgerynets.config.Config
    disable : list
        of comma-separated component sets, each adds one combination to
        the default full model plus single-component-off variants
    replicates : int
        overrides ``[TRAIN] REPLICATES``
    kinds_sweep : bool
        if True, compare prefixes of the low-level kinds instead of components
    results_path : Path
        where ``ablation.csv`` and ``ablation_replicates.csv`` are written.
        Default is ``[TRAIN] SAVE_PATH``.

    Returns
    -------
    df : pandas.DataFrame
        median acc, ap and router distribution per variant and family
    """
    if kinds_sweep:
        variants = kinds_sweep_variants(config.model)
    else:
        variants = ablation_variants(config.model, disable)
    replicates = config.train.replicates if replicates is None else replicates
    seeds = replicate_seeds(config.train.seed, replicates)

    train_samples = load_split(config.data, 'train', image_size=config.model.image_size)
    test_samples = load_split(config.data, 'test', image_size=config.model.image_size)

    medians = []
    replicate_frames = []
    for name, model_config in variants.items():
        frames = []
        for seed in seeds:
            logger.info('ablation variant %s, seed %d', name, seed)
            variant_config = attr.evolve(config, model=model_config, train=attr.evolve(config.train, seed=seed))
            save_path = make_save_path(config.train.save_path, 'ablation', name, f'seed_{seed}')
            model = train_full(variant_config, save_path, train_samples)
            df = evaluate_model(model, variant_config, test_samples).to_frame()
            frames.append(df)
            replicate_frames.append(df.assign(variant=name, seed=seed))
        median = median_frame(frames)
        median.insert(0, 'variant', name)
        medians.append(median)

    results_path = make_save_path(results_path or config.train.save_path)
    df = pd.concat(medians, ignore_index=True)
    df.to_csv(results_path.joinpath(ABLATION_CSV), index=False)
    pd.concat(replicate_frames, ignore_index=True).to_csv(results_path.joinpath(ABLATION_REPLICATES_CSV),
                                                         index=False)
    logger.info('ablation, median over %d replicates:\n%s', len(seeds), df.to_string(index=False))
    return df
