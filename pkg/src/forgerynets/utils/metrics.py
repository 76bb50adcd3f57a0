"""accuracy and average precision of fused scores, overall and per forgery family"""
import math

import attr
import numpy as np
import pandas as pd
import sklearn.metrics

from ..datasets.records import Family
from ..errors import DataError

# scores at or above the threshold predict fake
THRESHOLD = 0.5


def _as_arrays(y_true, scores):
    y_true = np.asarray(y_true).astype(np.int64).ravel()
    scores = np.asarray(scores, dtype=np.float64).ravel()
    if y_true.shape != scores.shape:
        raise DataError(f'got {y_true.shape[0]} labels but {scores.shape[0]} scores')
    if y_true.size == 0:
        raise DataError('cannot compute metrics on an empty set of samples')
    return y_true, scores


def accuracy(y_true, scores, threshold=THRESHOLD):
    """fraction of samples where ``scores >= threshold`` matches the label"""
    y_true, scores = _as_arrays(y_true, scores)
    return float(sklearn.metrics.accuracy_score(y_true, (scores >= threshold).astype(np.int64)))


def average_precision(y_true, scores):
    """area under the precision-recall curve, summing precision at each positive rank.
    Tied scores share one threshold. NaN if there are no positives"""
    y_true, scores = _as_arrays(y_true, scores)
    if y_true.sum() == 0:
        return math.nan
    return float(sklearn.metrics.average_precision_score(y_true, scores))


@attr.s
class Metrics:
    """metrics of one evaluation

    Attributes
    ----------
    acc : float
    ap : float
    n_samples : int
    per_family : dict
        family name -> {'n': int, 'acc': float, 'ap': float}. For a forgery family
        these are computed over its fakes together with every real sample,
        'NONE' holds the accuracy on real samples alone.
    router_mean : dict
        family name -> mean router distribution over the samples of that family,
        including 'NONE' for real samples
    streams : list
        stream names, the order of the router distribution
    """
    acc = attr.ib(converter=float)
    ap = attr.ib(converter=float)
    n_samples = attr.ib(converter=int)
    per_family = attr.ib(factory=dict)
    router_mean = attr.ib(factory=dict)
    streams = attr.ib(factory=list)

    def to_frame(self):
        """one row for all samples plus one row per family"""
        records = [{'family': 'ALL', 'n': self.n_samples, 'acc': self.acc, 'ap': self.ap}]
        for name, values in self.per_family.items():
            records.append({'family': name, **values})
        df = pd.DataFrame.from_records(records, columns=['family', 'n', 'acc', 'ap'])
        if self.router_mean:
            for j, stream in enumerate(self.streams):
                df[f'p_{stream}'] = [
                    self.router_mean[row_family][j] if row_family in self.router_mean else np.nan
                    for row_family in df['family']
                ]
        return df

    def to_text(self):
        return self.to_frame().to_string(index=False, float_format=lambda x: f'{x:.4f}')


def compute_metrics(y_true, scores, families=None, p=None, streams=None, threshold=THRESHOLD):
    """Metrics of fused ``scores`` against ``y_true``

    Parameters
    ----------
    y_true : array-like
        0 for real, 1 for fake
    scores : array-like
        fused probabilities of being fake
    families : array-like
        Family value of each sample. Default is None, no per-family breakdown.
    p : array-like
        (n, M+1) router distributions. Default is None, no router statistics.
    streams : list
        stream names, one per column of ``p``
    threshold : float
    """
    y_true, scores = _as_arrays(y_true, scores)
    metrics = Metrics(acc=accuracy(y_true, scores, threshold),
                      ap=average_precision(y_true, scores),
                      n_samples=y_true.shape[0],
                      streams=list(streams) if streams is not None else [])
    if families is None:
        return metrics

    families = np.asarray(families).astype(np.int64).ravel()
    is_real = families == Family.NONE
    if is_real.any():
        # AP is undefined without positives
        metrics.per_family[Family.NONE.name] = {
            'n': int(is_real.sum()),
            'acc': accuracy(y_true[is_real], scores[is_real], threshold),
            'ap': math.nan,
        }
    for family in Family:
        if family is Family.NONE:
            continue
        is_family = families == family
        if not is_family.any():
            continue
        subset = is_family | is_real
        metrics.per_family[family.name] = {
            'n': int(is_family.sum()),
            'acc': accuracy(y_true[subset], scores[subset], threshold),
            'ap': average_precision(y_true[subset], scores[subset]),
        }

    if p is not None:
        p = np.asarray(p, dtype=np.float64)
        for family in Family:
            is_family = families == family
            if is_family.any():
                metrics.router_mean[family.name] = p[is_family].mean(axis=0)
    return metrics


def median_frame(frames):
    """element-wise median over replicate metric frames with identical rows"""
    stacked = pd.concat(frames, keys=range(len(frames)), names=['replicate'])
    return stacked.groupby('family', sort=False).median(numeric_only=True).reset_index()
