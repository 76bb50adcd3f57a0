"""PyTorch Dataset class for the forgery corpus"""
import numpy as np
import torch
from torch.utils.data import Dataset

from ..errors import DataError
from .container import read_dataset


class ForgeryDataset(Dataset):
    """dataset of real and forged images, read from a binary dataset file"""

    def __init__(self,
                 samples,
                 transform=None,
                 target_transform=None):
        """

        Parameters
        ----------
        samples : list
            of SampleRecord, e.g. as returned by ``forgerynets.datasets.read_dataset``
        transform : callable
            transform to be applied to a single image from the dataset
        target_transform : callable
            transform to be applied to target
        """
        if len(samples) == 0:
            raise DataError('dataset is empty')
        self.samples = samples
        self.transform = transform
        self.target_transform = target_transform

        self.target = np.asarray([sample.label for sample in samples], dtype=np.float32)
        self.family = np.asarray([int(sample.family) for sample in samples], dtype=np.int64)

    @classmethod
    def from_file(cls, path, transform=None, target_transform=None):
        return cls(read_dataset(path), transform=transform, target_transform=target_transform)

    def __len__(self):
        return len(self.samples)

    def __getitem__(self, idx):
        if torch.is_tensor(idx):
            idx = idx.tolist()

        img = self.samples[idx].image
        target = self.target[idx]

        if self.transform:
            img = self.transform(img)

        if self.target_transform:
            target = self.target_transform(target)

        sample = {
            'img': img,
            'target': target,
            'family': self.family[idx],
        }

        return sample
