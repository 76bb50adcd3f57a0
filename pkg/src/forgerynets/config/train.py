"""class to represent train section of config.ini file """
from pathlib import Path

import attr
from attr import validators

from ..errors import ConfigurationError
from ..nets.router import MOE_SIGNS
from ..transforms.functional import Distortion
from .validators import (
    is_list_of_str,
    is_non_neg,
    is_non_neg_int,
    is_pos_int,
    one_of,
    optional,
    to_bool,
    to_float,
    to_float_list,
    to_int,
    to_list,
    to_path,
    to_str,
)


def is_betas(instance, attribute, value):
    if len(value) != 2 or not all(0. <= beta < 1. for beta in value):
        raise ConfigurationError(f'{attribute.name} must be two numbers in [0, 1), got {value}')


def is_augment(instance, attribute, value):
    is_list_of_str(instance, attribute, value)
    for kind in value:
        if Distortion.from_str(kind) is Distortion.NONE:
            raise ConfigurationError(f"{attribute.name} lists distortions to augment with, 'none' is not one")


@attr.s
class TrainConfig:
    """class to represent [TRAIN] section of config.ini file

    Attributes
    ----------
    phase : int
        1 trains each modality's experts and head, and the low-level encoder,
        separately on the frozen base. 2 loads the phase-1 fragments and trains
        the fusion modules with the total loss. Default is 1.
    modality : str
        phase-1 target: a stream name from the model kinds, 'encoder', or 'all'. Default is 'all'.
    learning_rate : float
        Default is 2e-4.
    betas : list
        Adam betas. Default is [0.9, 0.999].
    batch_size : int
        Default is 32.
    epochs : int
        Default is 10.
    moe_lambda : float
        weight of the router entropy term in the total loss. Default is 0.1.
    moe_sign : str
        'literal' adds the entropy to the loss and sharpens routing,
        'balance' subtracts it and spreads routing across experts. Default is 'literal'.
    seed : int
        seeds every random number generator. Default is 0.
    replicates : int
        number of training replicates with seeds ``seed``, ``seed + 1``, ... Default is 1.
    freeze_lora : bool
        if True, LoRA experts stay fixed at their phase-1 values in phase 2. Default is False.
    augment : list
        distortions for distortion-augmented training: each image passes, with probability
        one half, through one of them drawn uniformly. Default is [], no augmentation.
    summary_step : int
        step on which to write loss summaries for tensorboard.
        Each minibatch is counted as one step, and steps are counted across epochs. Default is None.
    num_workers : int
        number of workers used by torch.DataLoaders. Default is 0.
    save_path : Path
        directory where checkpoints, run logs and reports are saved. Default is 'results'.
    resume : Path
        checkpoint to resume training from. Default is None.
    device : str
        Default is 'cpu'.
    """
    phase = attr.ib(converter=to_int, validator=one_of(1, 2), default=1)
    modality = attr.ib(converter=to_str, default='all')
    learning_rate = attr.ib(converter=to_float, validator=is_non_neg, default=2e-4)
    betas = attr.ib(converter=to_float_list, validator=is_betas, factory=lambda: [0.9, 0.999])
    batch_size = attr.ib(converter=to_int, validator=is_pos_int, default=32)
    epochs = attr.ib(converter=to_int, validator=is_pos_int, default=10)
    moe_lambda = attr.ib(converter=to_float, validator=is_non_neg, default=0.1)
    moe_sign = attr.ib(converter=to_str, validator=one_of(*MOE_SIGNS), default='literal')
    seed = attr.ib(converter=to_int, validator=is_non_neg_int, default=0)
    replicates = attr.ib(converter=to_int, validator=is_pos_int, default=1)
    freeze_lora = attr.ib(converter=to_bool, default=False)
    augment = attr.ib(converter=to_list, validator=is_augment, factory=list)
    summary_step = attr.ib(converter=optional(to_int), validator=validators.optional(is_pos_int), default=None)
    num_workers = attr.ib(converter=to_int, validator=is_non_neg_int, default=0)
    save_path = attr.ib(converter=to_path, default=Path('results'))
    resume = attr.ib(converter=optional(to_path), default=None)
    device = attr.ib(converter=to_str, validator=one_of('cpu', 'cuda'), default='cpu')
