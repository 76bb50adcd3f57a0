"""how well each low-level extractor alone separates each forgery family from real images"""
import logging

import joblib
import numpy as np
import pandas as pd
import torch
from sklearn.linear_model import LogisticRegression
from sklearn.metrics import accuracy_score
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import StandardScaler

from ..datasets import Family
from ..errors import DataError
from ..extractors import DEFAULT_SRM_KERNELS, ModalityExtractor

logger = logging.getLogger(__name__)

# images per batch when extracting planes
BATCH_SIZE = 256


def pooled_features(planes):
    """per-channel mean, mean absolute value and standard deviation of each plane

    Parameters
    ----------
    planes : torch.Tensor, numpy.ndarray
        (B, C, H, W)

    Returns
    -------
    features : numpy.ndarray
        (B, 3 C)
    """
    planes = torch.as_tensor(planes, dtype=torch.float64)
    if planes.dim() != 4:
        raise DataError(f'expected planes of shape (B, C, H, W), got {tuple(planes.shape)}')
    return torch.cat([
        planes.mean(dim=(-2, -1)),
        planes.abs().mean(dim=(-2, -1)),
        planes.std(dim=(-2, -1)),
    ], dim=1).numpy()


def _features_by_kind(samples, extractor):
    """kind -> (n, 9) pooled features of the raw planes of that kind"""
    by_kind = {kind: [] for kind in extractor.kinds}
    for start in range(0, len(samples), BATCH_SIZE):
        img = torch.from_numpy(np.stack([sample.image for sample in samples[start:start + BATCH_SIZE]]))
        planes = extractor.extract_raw(img.to(torch.float64))
        for j, kind in enumerate(extractor.kinds):
            by_kind[kind].append(pooled_features(planes[:, j]))
    return {kind: np.concatenate(features) for kind, features in by_kind.items()}


def probe_matrix(train, test, kinds, npr_factor=2, hpr_sigma=1.0, srm_kernels=DEFAULT_SRM_KERNELS, seed=0):
    """accuracy of a logistic-regression probe per extractor kind

    Each probe is fit on pooled features of one kind over ``train``, then scored on
    every family of ``test``: that family's fakes together with every real sample.

    Parameters
    ----------
    train : list
        of SampleRecord, RGB
    test : list
        of SampleRecord, RGB
    kinds : list
        of extractor kinds

    Returns
    -------
    df : pandas.DataFrame
        index is kind, one column of accuracies per forgery family in ``test``
    """
    if not train or not test:
        raise DataError('probe_matrix needs non-empty train and test samples')
    extractor = ModalityExtractor(kinds, npr_factor=npr_factor, hpr_sigma=hpr_sigma, srm_kernels=srm_kernels)
    y_train = np.asarray([sample.label for sample in train])
    y_test = np.asarray([sample.label for sample in test])
    if np.unique(y_train).size < 2:
        raise DataError('probe training split must hold both real and fake samples')
    families = np.asarray([int(sample.family) for sample in test])
    is_real = families == Family.NONE

    train_features = _features_by_kind(train, extractor)
    test_features = _features_by_kind(test, extractor)

    records = {}
    for kind in extractor.kinds:
        probe = make_pipeline(StandardScaler(), LogisticRegression(max_iter=1000, random_state=seed))
        probe.fit(train_features[kind], y_train)
        y_pred = probe.predict(test_features[kind])
        row = {}
        for family in Family:
            is_family = families == family
            if family is Family.NONE or not is_family.any():
                continue
            subset = is_family | is_real
            row[family.name] = accuracy_score(y_test[subset], y_pred[subset])
        records[kind.value] = row

    df = pd.DataFrame.from_dict(records, orient='index')
    df.index.name = 'kind'
    logger.info('probe accuracy by kind and family:\n%s', df.to_string())
    return df


def feature_dump_to_df(dump_path):
    """one row per sample of a feature dump written by ``forgerynets eval --dump-features``:
    label, family name, fused score, most-weighted stream and the router distribution.
    Input for externally rendered bar charts of routing per family."""
    dump = joblib.load(dump_path)
    streams = dump['streams']
    df = pd.DataFrame({
        'target': dump['target'],
        'family': [Family(int(family)).name for family in dump['family']],
        'fused': dump['fused'],
        'argmax_modality': [streams[j] for j in dump['argmax_modality']],
    })
    for j, stream in enumerate(streams):
        df[f'p_{stream}'] = dump['p'][:, j]
    return df
