"""phase-2 trainer and the trainers of the two fusion baselines"""
import logging

import torch

from ..checkpoint import load_model
from ..errors import ConfigurationError, ContractError
from ..nets.baselines import freeze_for_late_fusion
from ..nets.router import bce_loss, total_loss
from ..utils.general import phase1_ckpt_path, phase2_ckpt_path
from .abstract_trainer import AbstractTrainer
from .trainer import _trainer_kwargs

logger = logging.getLogger(__name__)

BASE_PREFIX = 'backbone.base.'


def base_snapshot(model):
    """copies of every frozen base tensor"""
    return {name: tensor.detach().clone()
            for name, tensor in model.state_dict().items() if name.startswith(BASE_PREFIX)}


def check_base_unchanged(model, snapshot):
    """raise ContractError if any frozen base tensor differs from ``snapshot``"""
    current = base_snapshot(model)
    changed = [name for name, tensor in snapshot.items() if not torch.equal(tensor, current[name])]
    if changed:
        raise ContractError(f'frozen base tensors changed during training: {changed}')


def load_phase1(model, save_path):
    """load every phase-1 fragment found under ``save_path`` into ``model``

    Raises
    ------
    ConfigurationError
        naming the first modality whose fragment is missing
    """
    for target in model.phase1_targets():
        ckpt_path = phase1_ckpt_path(save_path, target)
        if not ckpt_path.is_file():
            raise ConfigurationError(
                f'phase 2 needs the phase-1 checkpoint of modality {target}, not found: {ckpt_path}'
            )
        load_model(model, ckpt_path, strict=False, prefixes=model.fragment_prefixes(target))
        logger.info('loaded phase-1 fragment of %s from %s', target, ckpt_path)
    return model


class FusionTrainer(AbstractTrainer):
    """trains whatever the model marks trainable on its fused prediction with
    binary cross entropy plus ``moe_lambda`` times the signed router entropy"""
    def __init__(self, moe_lambda=0.1, moe_sign='literal', **kwargs):
        self.moe_lambda = moe_lambda
        self.moe_sign = moe_sign
        super().__init__(**kwargs)
        self.base = base_snapshot(self.model)

    @classmethod
    def from_config(cls, model, trainset, save_path, train_config, ckpt_path=None):
        """factory for phase 2: loads the phase-1 fragments under ``save_path``,
        then trains the fusion gates, adapter, router and heads, and the LoRA
        experts unless ``freeze_lora``

        Parameters
        ----------
        model : forgerynets.nets.ForgeryDetector
        trainset : torch.utils.data.Dataset
        save_path : Path
        train_config : forgerynets.config.TrainConfig
        ckpt_path : Path
            default is ``save_path/phase2.ckpt``
        """
        load_phase1(model, save_path)
        names = model.set_phase(2, freeze_lora=train_config.freeze_lora)
        logger.info('phase 2: training %d tensors', len(names))
        return cls(moe_lambda=train_config.moe_lambda,
                   moe_sign=train_config.moe_sign,
                   model=model,
                   trainset=trainset,
                   save_path=save_path.joinpath('phase2'),
                   ckpt_path=ckpt_path or phase2_ckpt_path(save_path),
                   **_trainer_kwargs(train_config))

    @classmethod
    def late_fusion(cls, model, trainset, save_path, train_config, phase1_path):
        """late-fusion baseline: phase-1 fragments loaded, only the shared head on the
        concatenated CLS tokens trains"""
        load_phase1(model, phase1_path)
        names = freeze_for_late_fusion(model)
        logger.info('late fusion: training %s', names)
        return cls(moe_lambda=0.,
                   model=model,
                   trainset=trainset,
                   save_path=save_path.joinpath('late'),
                   ckpt_path=save_path.joinpath('late.ckpt'),
                   **_trainer_kwargs(train_config))

    @classmethod
    def early_fusion(cls, model, trainset, save_path, train_config):
        """early-fusion baseline: mixing convolutions, LoRA experts, embedding and head train together"""
        names = model.set_trainable()
        logger.info('early fusion: training %d tensors', len(names))
        return cls(moe_lambda=0.,
                   model=model,
                   trainset=trainset,
                   save_path=save_path.joinpath('early'),
                   ckpt_path=save_path.joinpath('early.ckpt'),
                   **_trainer_kwargs(train_config))

    def compute_loss(self, batch):
        img, target = self.batch_to_device(batch)
        pred = self.model(img)
        if self.moe_lambda == 0.:
            return bce_loss(target, pred.fused)
        return total_loss(target, pred.fused, pred.p, lam=self.moe_lambda, moe_sign=self.moe_sign)

    def save(self):
        check_base_unchanged(self.model, self.base)
        super().save()
