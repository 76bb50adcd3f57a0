"""transforms used with Torch Datasets: robustness distortions and grid-aligned crops"""
from enum import Enum

import attr
from attr import validators
from attr.validators import instance_of
import numpy as np
import scipy.fft
import torch
import torch.nn.functional as F

from ..core import functional as core
from ..errors import ConfigurationError, DimensionError
from ..extractors.functional import gaussian_kernel1d

__all__ = [
    'Distortion',
    'DistortionConfig',
    'apply_distortion',
    'center_aligned_crop',
    'downsample_restore',
    'gaussian_blur',
    'jpeg_quant_table',
    'jpeg_surrogate',
    'random_aligned_crop',
    'tensor_from_numpy_scalar',
]

JPEG_BLOCK = 8

# standard JPEG luminance quantization table, quality 50
JPEG_LUMINANCE = np.array([
    [16, 11, 10, 16, 24, 40, 51, 61],
    [12, 12, 14, 19, 26, 58, 60, 55],
    [14, 13, 16, 24, 40, 57, 69, 56],
    [14, 17, 22, 29, 51, 87, 80, 62],
    [18, 22, 37, 56, 68, 109, 103, 77],
    [24, 35, 55, 64, 81, 104, 113, 92],
    [49, 64, 78, 87, 103, 121, 120, 101],
    [72, 92, 95, 98, 112, 100, 103, 99],
], dtype=np.float64)


class Distortion(Enum):
    NONE = 'none'
    BLUR = 'blur'
    DOWNSAMPLE = 'down'
    JPEGQ = 'jpeg'

    @classmethod
    def from_str(cls, value):
        if isinstance(value, cls):
            return value
        value = str(value).strip().lower()
        aliases = {'downsample': 'down', 'jpegq': 'jpeg'}
        value = aliases.get(value, value)
        try:
            return cls(value)
        except ValueError:
            raise ConfigurationError(
                f'invalid distortion: {value}. Valid distortions are: {[kind.value for kind in cls]}'
            ) from None


def _is_positive(instance, attribute, value):
    if value <= 0:
        raise ConfigurationError(f'{attribute.name} must be positive, but was {value}')


def _is_ratio(instance, attribute, value):
    if not 0. < value < 1.:
        raise ConfigurationError(f'{attribute.name} must be between 0 and 1 (exclusive), but was {value}')


def _is_quality(instance, attribute, value):
    if not 1 <= value <= 100:
        raise ConfigurationError(f'{attribute.name} must be in [1, 100], but was {value}')


@attr.s(frozen=True)
class DistortionConfig:
    """one robustness distortion and its parameters

    Attributes
    ----------
    kind : Distortion
    blur_sigma : float
        standard deviation of Gaussian blur. Default is 1.0.
    down_ratio : float
        image is resized to ``down_ratio`` x its size and back. Default is 0.5.
    jpeg_quality : int
        quality factor of the blockwise-DCT JPEG surrogate. Default is 95.
    """
    kind = attr.ib(converter=Distortion.from_str, default=Distortion.NONE)
    blur_sigma = attr.ib(converter=float, validator=_is_positive, default=1.0)
    down_ratio = attr.ib(converter=float, validator=_is_ratio, default=0.5)
    jpeg_quality = attr.ib(converter=int, validator=_is_quality, default=95)


def gaussian_blur(img, sigma=1.0):
    """separable Gaussian blur with kernel radius ceil(3 sigma) and reflection padding"""
    taps = gaussian_kernel1d(sigma).to(img.dtype)
    radius = taps.shape[0] // 2
    unbatched = img.dim() == 3
    x = img.unsqueeze(0) if unbatched else img
    c = x.shape[1]
    horizontal = taps.view(1, 1, 1, -1).expand(c, 1, 1, -1)
    vertical = taps.view(1, 1, -1, 1).expand(c, 1, -1, 1)
    x = F.pad(x, (radius, radius, 0, 0), mode='reflect')
    x = core.conv2d(x, horizontal)
    x = F.pad(x, (0, 0, radius, radius), mode='reflect')
    x = core.conv2d(x, vertical)
    return x.squeeze(0) if unbatched else x


def downsample_restore(img, ratio=0.5):
    """bilinear resize to ``ratio`` x the size, then bilinear back to the original size"""
    unbatched = img.dim() == 3
    x = img.unsqueeze(0) if unbatched else img
    h, w = x.shape[-2:]
    small = (max(1, int(round(h * ratio))), max(1, int(round(w * ratio))))
    x = F.interpolate(x, size=small, mode='bilinear', align_corners=False)
    x = F.interpolate(x, size=(h, w), mode='bilinear', align_corners=False)
    return x.squeeze(0) if unbatched else x


def jpeg_quant_table(quality):
    """luminance table scaled by ``quality`` the way the IJG encoder does it"""
    if not 1 <= quality <= 100:
        raise ConfigurationError(f'JPEG quality must be in [1, 100], but was {quality}')
    scale = 5000. / quality if quality < 50 else 200. - 2. * quality
    table = np.floor((JPEG_LUMINANCE * scale + 50.) / 100.)
    return np.clip(table, 1., 255.)


def jpeg_surrogate(img, quality=95):
    """blockwise 8x8 DCT quantization of every channel, no entropy coding or chroma subsampling

    Parameters
    ----------
    img : torch.Tensor
        (C, H, W) with values in [0, 1]
    quality : int
        in [1, 100]

    Returns
    -------
    out : torch.Tensor
        same shape and dtype as ``img``
    """
    if img.dim() != 3:
        raise DimensionError(f'expected image of shape (C, H, W), got {tuple(img.shape)}')
    table = jpeg_quant_table(quality)
    c, h, w = img.shape
    x = img.detach().cpu().numpy().astype(np.float64) * 255. - 128.
    pad_h, pad_w = (-h) % JPEG_BLOCK, (-w) % JPEG_BLOCK
    x = np.pad(x, ((0, 0), (0, pad_h), (0, pad_w)), mode='edge')
    bh, bw = x.shape[1] // JPEG_BLOCK, x.shape[2] // JPEG_BLOCK
    # (C, H, W) -> (C, bh, bw, 8, 8)
    blocks = x.reshape(c, bh, JPEG_BLOCK, bw, JPEG_BLOCK).transpose(0, 1, 3, 2, 4)
    coefs = scipy.fft.dctn(blocks, axes=(-2, -1), norm='ortho')
    coefs = np.round(coefs / table) * table
    blocks = scipy.fft.idctn(coefs, axes=(-2, -1), norm='ortho')
    x = blocks.transpose(0, 1, 3, 2, 4).reshape(c, bh * JPEG_BLOCK, bw * JPEG_BLOCK)[:, :h, :w]
    x = (x + 128.) / 255.
    return torch.from_numpy(x).to(dtype=img.dtype, device=img.device)


def apply_distortion(img, cfg):
    """apply the distortion described by ``cfg`` to a (C, H, W) image and clamp to [0, 1].
    Distortion.NONE returns ``img`` unchanged."""
    if cfg.kind is Distortion.NONE:
        return img
    elif cfg.kind is Distortion.BLUR:
        out = gaussian_blur(img, cfg.blur_sigma)
    elif cfg.kind is Distortion.DOWNSAMPLE:
        out = downsample_restore(img, cfg.down_ratio)
    elif cfg.kind is Distortion.JPEGQ:
        out = jpeg_surrogate(img, cfg.jpeg_quality)
    else:
        raise ConfigurationError(f'invalid distortion: {cfg.kind}')
    return out.clamp(0., 1.)


def _crop_pad(img, top, left, crop_size):
    h, w = img.shape[-2:]
    crop = img[..., top:top + crop_size, left:left + crop_size]
    pad_top = (h - crop_size) // 2
    pad_left = (w - crop_size) // 2
    return F.pad(crop, (pad_left, w - crop_size - pad_left, pad_top, h - crop_size - pad_top))


def _check_crop(img, crop_size, align):
    h, w = img.shape[-2:]
    if crop_size > h or crop_size > w:
        raise DimensionError(f'crop size {crop_size} is larger than image {tuple(img.shape)}')
    if ((h - crop_size) // 2) % align != 0 or ((w - crop_size) // 2) % align != 0:
        raise DimensionError(
            f'padding crop {crop_size} back to {h}x{w} would break the {align}-pixel grid alignment'
        )


def random_aligned_crop(img, crop_size, align=2):
    """crop a ``crop_size`` square at a random offset that is a multiple of ``align``,
    then zero-pad back to the input size so the sampling grid stays aligned.

    Uses the global torch random number generator.
    """
    _check_crop(img, crop_size, align)
    h, w = img.shape[-2:]
    n_top = (h - crop_size) // align + 1
    n_left = (w - crop_size) // align + 1
    top = int(torch.randint(n_top, (1,))) * align
    left = int(torch.randint(n_left, (1,))) * align
    return _crop_pad(img, top, left, crop_size)


def center_aligned_crop(img, crop_size, align=2):
    """deterministic counterpart of ``random_aligned_crop``: keep the central content"""
    _check_crop(img, crop_size, align)
    h, w = img.shape[-2:]
    top = ((h - crop_size) // 2) // align * align
    left = ((w - crop_size) // 2) // align * align
    return _crop_pad(img, top, left, crop_size)


def tensor_from_numpy_scalar(num):
    return torch.tensor(num)
