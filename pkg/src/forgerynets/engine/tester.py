"""Tester class"""
import logging
from pathlib import Path

import joblib
import numpy as np
import torch
from torch.utils.data import DataLoader
from tqdm import tqdm

from ..checkpoint import load_model
from ..errors import DataError
from ..utils.metrics import compute_metrics

logger = logging.getLogger(__name__)

NUM_WORKERS = 0


class Tester:
    """class for measuring accuracy and average precision of a trained detector on a test set"""
    def __init__(self,
                 model,
                 testset,
                 restore_path=None,
                 batch_size=64,
                 device='cpu',
                 num_workers=NUM_WORKERS,
                 modality=None,
                 ):
        """create new Tester instance

        Parameters
        ----------
        model : torch.nn.Module
            ForgeryDetector or EarlyFusionNet; its forward returns a Prediction
        testset : torch.utils.data.Dataset
            yields dicts with 'img', 'target' and 'family'
        restore_path : Path
            checkpoint loaded into ``model`` before testing. Default is None,
            test the model as it is.
        batch_size : int
        device : str
            One of {'cpu', 'cuda'}
        num_workers : int
            Number of workers used when loading data in parallel. Default is 0.
        modality : str
            if given, test that single stream of a ForgeryDetector through its own head,
            as phase 1 trained it. Default is None, test the fused prediction.
        """
        if len(testset) == 0:
            raise DataError('cannot evaluate on an empty dataset')
        if restore_path is not None:
            load_model(model, restore_path)
            logger.info('loaded model from %s', restore_path)
        self.restore_path = restore_path
        model.to(device)
        self.model = model
        self.device = device
        self.dtype = next(model.parameters()).dtype

        self.testset = testset
        # sample order is fixed, so metrics only depend on checkpoint and data
        self.test_loader = DataLoader(self.testset, batch_size=batch_size,
                                      shuffle=False, num_workers=num_workers)
        self.batch_size = batch_size
        self.modality = modality

    @classmethod
    def from_config(cls, model, testset, eval_config, device='cpu', num_workers=NUM_WORKERS):
        """factory function that creates a Tester from the [EVAL] section of config.ini"""
        return cls(model=model,
                   testset=testset,
                   restore_path=eval_config.ckpt_path,
                   batch_size=eval_config.batch_size,
                   device=device,
                   num_workers=num_workers)

    @torch.no_grad()
    def predict(self):
        """run the model over the test set

        Returns
        -------
        outputs : dict
            'cls' (n, M+1, D) CLS features, 'p' (n, M+1) router distributions,
            'per_head' (n, M+1) per-modality probabilities, 'fused' (n,),
            'argmax_modality' (n,), 'target' (n,) and 'family' (n,), all numpy arrays
        """
        self.model.eval()

        outputs = {key: [] for key in ('cls', 'p', 'per_head', 'fused', 'argmax_modality', 'target', 'family')}
        total = len(self.test_loader)
        pbar = tqdm(self.test_loader)
        for i, batch in enumerate(pbar):
            pbar.set_description(f'batch {i} of {total}')
            img = batch['img'].to(self.device, dtype=self.dtype)
            if self.modality is None:
                pred = self.model(img)
            else:
                pred = self.model.predict_single(img, self.modality)
            for key in ('cls', 'p', 'per_head', 'fused', 'argmax_modality'):
                outputs[key].append(getattr(pred, key).cpu().numpy())
            outputs['target'].append(batch['target'].numpy())
            outputs['family'].append(batch['family'].numpy())

        return {key: np.concatenate(value) for key, value in outputs.items()}

    def test(self, dump_features=None):
        """compute metrics on the test set

        Parameters
        ----------
        dump_features : Path
            if not None, the outputs of ``predict`` plus stream names are written here with joblib

        Returns
        -------
        metrics : forgerynets.utils.metrics.Metrics
        """
        outputs = self.predict()
        if self.modality is not None:
            streams = [self.modality]
        else:
            streams = getattr(self.model, 'streams', None)
        if streams is None or len(streams) != outputs['p'].shape[1]:
            streams = [f'stream{j}' for j in range(outputs['p'].shape[1])]
        metrics = compute_metrics(outputs['target'],
                                  outputs['fused'],
                                  families=outputs['family'],
                                  p=outputs['p'],
                                  streams=streams)
        logger.info('test acc: %.4f, ap: %.4f on %d samples', metrics.acc, metrics.ap, metrics.n_samples)

        if dump_features is not None:
            dump_features = Path(dump_features)
            joblib.dump({**outputs, 'streams': list(streams)}, dump_features)
            logger.info('dumped features to %s', dump_features)
        return metrics
