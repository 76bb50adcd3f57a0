"""phase-1 trainers: one modality's experts and head, or the low-level encoder"""
import logging

import torch
import torch.nn as nn

from ..nets.detector import ENCODER
from ..nets.router import bce_loss
from ..utils.general import phase1_ckpt_path
from .abstract_trainer import AbstractTrainer

logger = logging.getLogger(__name__)


def _trainer_kwargs(train_config):
    return dict(learning_rate=train_config.learning_rate,
                betas=train_config.betas,
                batch_size=train_config.batch_size,
                epochs=train_config.epochs,
                summary_step=train_config.summary_step,
                seed=train_config.seed,
                device=train_config.device,
                num_workers=train_config.num_workers)


class ExpertTrainer(AbstractTrainer):
    """trains the patch embedding, LoRA experts and head of one stream on the frozen base,
    with binary cross entropy on that stream's own prediction"""
    def __init__(self, modality, **kwargs):
        self.modality = modality
        super().__init__(**kwargs)

    @classmethod
    def from_config(cls, model, modality, trainset, save_path, train_config):
        """factory function that creates an ExpertTrainer from the [TRAIN] section of config.ini

        Parameters
        ----------
        model : forgerynets.nets.ForgeryDetector
        modality : str
            stream name
        trainset : torch.utils.data.Dataset
        save_path : Path
            the fragment is saved to ``save_path/phase1_{modality}.ckpt``
        train_config : forgerynets.config.TrainConfig
        """
        names = model.set_phase(1, modality=modality)
        logger.info('phase 1, modality %s: training %d tensors', modality, len(names))
        return cls(modality=modality,
                   model=model,
                   trainset=trainset,
                   save_path=save_path.joinpath(modality),
                   ckpt_path=phase1_ckpt_path(save_path, modality),
                   ckpt_prefixes=model.fragment_prefixes(modality),
                   **_trainer_kwargs(train_config))

    def compute_loss(self, batch):
        img, target = self.batch_to_device(batch)
        return bce_loss(target, self.model.forward_single(img, self.modality))


class EncoderTrainer(AbstractTrainer):
    """trains the low-level encoder of the adapter through a temporary linear head on its prior.
    The temporary head is discarded, only ``adapter.encoder.*`` is saved"""
    def __init__(self, dim, model, **kwargs):
        self.temporary_head = nn.Linear(dim, 1).to(next(model.parameters()).dtype)
        super().__init__(model=model, extra_modules=[self.temporary_head], **kwargs)

    @classmethod
    def from_config(cls, model, trainset, save_path, train_config):
        names = model.set_phase(1, modality=ENCODER)
        logger.info('phase 1, low-level encoder: training %d tensors', len(names))
        return cls(dim=model.backbone.dim,
                   model=model,
                   trainset=trainset,
                   save_path=save_path.joinpath(ENCODER),
                   ckpt_path=phase1_ckpt_path(save_path, ENCODER),
                   ckpt_prefixes=model.fragment_prefixes(ENCODER),
                   **_trainer_kwargs(train_config))

    def compute_loss(self, batch):
        img, target = self.batch_to_device(batch)
        g = self.model.encode_prior(self.model.extractor(img))
        prob = torch.sigmoid(self.temporary_head(g)).squeeze(-1)
        return bce_loss(target, prob)
