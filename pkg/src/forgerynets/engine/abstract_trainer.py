"""AbstractTrainer class"""
import logging
from pathlib import Path

import torch
from torch.utils.data import DataLoader
from torch.utils.tensorboard import SummaryWriter
from tqdm import tqdm

from ..checkpoint import load_model, save_model
from ..core import make_generator
from ..errors import ConfigurationError, NumericalError
from ..extractors import ModalityExtractor

logger = logging.getLogger(__name__)


class AbstractTrainer:
    """abstract class for training detectors on the forgery corpus.
    Every phase-1, phase-2 and baseline trainer inherits from this class
    and implements ``compute_loss``.
    """
    NUM_WORKERS = 0

    def __init__(self,
                 model,
                 trainset,
                 save_path,
                 ckpt_path,
                 ckpt_prefixes=None,
                 extra_modules=(),
                 learning_rate=2e-4,
                 betas=(0.9, 0.999),
                 batch_size=32,
                 epochs=10,
                 summary_step=None,
                 seed=0,
                 device='cpu',
                 num_workers=NUM_WORKERS,
                 ):
        """returns new trainer instance

        Parameters
        ----------
        model : torch.nn.Module
            with ``requires_grad`` already set on the parameters that train.
        trainset : torch.utils.data.Dataset
            yields dicts with 'img', 'target' and 'family'
        save_path : Path
            directory for tensorboard summaries
        ckpt_path : Path
            where ``save`` writes the checkpoint at the end of training
        ckpt_prefixes : tuple
            if not None, only state-dict entries under these prefixes are saved
        extra_modules : sequence
            of torch.nn.Module that train with the model but are not part of it,
            e.g. temporary heads. Never saved.
        learning_rate : float
        betas : tuple
            Adam betas
        batch_size : int
        epochs : int
        summary_step : int
            step at which to save summary to file.
            Occurs every time step % summary_step == 0.
            Each minibatch is considered a step, and steps are counted across epochs.
        seed : int
            seeds the shuffling of the training set
        device : str
            One of {'cpu', 'cuda'}
        num_workers : int
            Number of workers used when loading data in parallel. Default is 0.
        """
        model.to(device)
        self.model = model
        self.extra_modules = [module.to(device) for module in extra_modules]
        self.device = device
        self.dtype = next(model.parameters()).dtype

        self.trainset = trainset
        self.train_loader = DataLoader(self.trainset, batch_size=batch_size,
                                       shuffle=True, num_workers=num_workers,
                                       generator=make_generator(seed))

        params = [param for param in model.parameters() if param.requires_grad]
        for module in self.extra_modules:
            params.extend(param for param in module.parameters() if param.requires_grad)
        if not params:
            raise ConfigurationError(f'{type(self).__name__} has no trainable parameters')
        self.optimizer = torch.optim.Adam(params, lr=learning_rate, betas=tuple(betas))

        self.batch_size = batch_size
        self.step = 0  # each minibatch is a step, and we count steps across epochs
        self.epochs = epochs
        self.loss_history = []

        self.save_path = Path(save_path)
        self.ckpt_path = Path(ckpt_path)
        self.ckpt_prefixes = ckpt_prefixes
        self.summary_step = summary_step
        if summary_step:
            self.train_writer = SummaryWriter(
                log_dir=str(self.save_path.joinpath('train'))
            )
        else:
            self.train_writer = None

    def compute_loss(self, batch):
        raise NotImplementedError

    def batch_to_device(self, batch):
        img = batch['img'].to(self.device, dtype=self.dtype)
        target = batch['target'].to(self.device, dtype=self.dtype)
        return img, target

    def resume(self, ckpt_path):
        """load a checkpoint written by an earlier run of this trainer"""
        logger.info('resuming from %s', ckpt_path)
        load_model(self.model, ckpt_path, strict=False)

    def save(self):
        logger.info('Saving checkpoint in %s', self.ckpt_path)
        save_model(self.model, self.ckpt_path, prefixes=self.ckpt_prefixes)

    def train(self):
        """train for ``epochs`` epochs, then save the checkpoint

        Returns
        -------
        loss_history : list
            average training loss of each epoch
        """
        for epoch in range(1, self.epochs + 1):
            logger.info('Epoch %d', epoch)
            self.loss_history.append(self.train_one_epoch(epoch=epoch))

        if self.train_writer is not None:
            self.train_writer.close()
        self.save()
        return self.loss_history

    def project_constraints(self):
        """put constrained kernels back on their constraint set after an optimizer step"""
        for module in self.model.modules():
            if isinstance(module, ModalityExtractor):
                module.project_constraints()

    def train_one_epoch(self, epoch):
        """train model for one epoch, returns the average loss"""
        self.model.train()

        total_loss = 0.0

        batch_total = len(self.train_loader)
        batch_pbar = tqdm(self.train_loader)

        for i, batch in enumerate(batch_pbar):
            self.step += 1

            loss = self.compute_loss(batch)
            if not torch.isfinite(loss):
                raise NumericalError(
                    f'training loss is not finite ({loss.item()}) at epoch {epoch}, step {self.step}'
                )

            self.optimizer.zero_grad()
            loss.backward()
            self.optimizer.step()
            self.project_constraints()

            batch_pbar.set_description(f'batch {i} of {batch_total}, loss: {loss.item(): 7.3f}')
            total_loss += loss.item()

            if self.summary_step:
                if self.step % self.summary_step == 0:
                    self.train_writer.add_scalar('loss/train', loss.item(), self.step)

        avg_loss = total_loss / batch_total
        logger.info('\tTraining Avg. Loss: %7.3f', avg_loss)
        return avg_loss
