import torch

from . import functional as F


__all__ = [
    'CenterAlignedCrop',
    'Distort',
    'RandomAlignedCrop',
    'RandomDistortion',
    'TensorFromArray',
    'TensorFromNumpyScalar',
]


class TensorFromArray:
    """convert a (C, H, W) numpy array from a dataset record to a float tensor"""
    def __call__(self, arr):
        return torch.from_numpy(arr.copy())


class TensorFromNumpyScalar:
    """convert a numpy scalar target to a float tensor, as expected by binary cross-entropy"""
    def __call__(self, num):
        return F.tensor_from_numpy_scalar(num).float()


class RandomAlignedCrop:
    """random crop with grid-aligned offsets, zero-padded back to the input size

    Parameters
    ----------
    crop_size : int
        side of the square crop
    align : int
        crop offsets are multiples of ``align``. Use the NPR factor so
        upsampling residues are not shifted off their grid.
    """
    def __init__(self, crop_size, align=2):
        self.crop_size = crop_size
        self.align = align

    def __call__(self, img):
        return F.random_aligned_crop(img, self.crop_size, self.align)


class CenterAlignedCrop:
    def __init__(self, crop_size, align=2):
        self.crop_size = crop_size
        self.align = align

    def __call__(self, img):
        return F.center_aligned_crop(img, self.crop_size, self.align)


class Distort:
    """apply one fixed distortion, e.g. to every image of a test split"""
    def __init__(self, cfg):
        self.cfg = cfg

    def __call__(self, img):
        return F.apply_distortion(img, self.cfg)


class RandomDistortion:
    """with probability ``p``, apply one distortion drawn uniformly from ``cfgs``.
    Uses the global torch random number generator."""
    def __init__(self, cfgs, p=0.5):
        self.cfgs = list(cfgs)
        self.p = p

    def __call__(self, img):
        if not self.cfgs:
            return img
        if float(torch.rand(())) >= self.p:
            return img
        ind = int(torch.randint(len(self.cfgs), (1,)))
        return F.apply_distortion(img, self.cfgs[ind])
