"""ModalityExtractor: raw RGB batch -> standardized stack of per-kind planes"""
from enum import Enum
import logging

import torch
import torch.nn as nn

from ..errors import ConfigurationError, DimensionError
from . import functional as F

logger = logging.getLogger(__name__)

# standardized planes are clamped to [-CLAMP, CLAMP]
CLAMP = 4.0

# floor on dataset standard deviation, planes with less spread are only centered
MIN_STD = 1e-6


class ExtractorKind(Enum):
    """information planes a model can consume. IMAGE is the plain RGB stream"""
    IMAGE = 'image'
    SRM = 'srm'
    NPR = 'npr'
    BAYAR = 'bayar'
    HPR = 'hpr'

    @classmethod
    def from_str(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ConfigurationError(
                f'invalid extractor kind: {value}. Valid kinds are: {[kind.value for kind in cls]}'
            ) from None


def validate_kinds(kinds, min_lowlevel=0):
    """check that ``kinds`` lists IMAGE exactly once plus distinct low-level kinds

    Returns
    -------
    kinds : list
        of ExtractorKind
    """
    kinds = [ExtractorKind.from_str(kind) for kind in kinds]
    if kinds.count(ExtractorKind.IMAGE) != 1:
        raise ConfigurationError(f'kinds must list IMAGE exactly once, got {[kind.value for kind in kinds]}')
    if len(set(kinds)) != len(kinds):
        raise ConfigurationError(f'kinds must be distinct, got {[kind.value for kind in kinds]}')
    if len(kinds) - 1 < min_lowlevel:
        raise ConfigurationError(
            f'need at least {min_lowlevel} low-level kinds besides IMAGE, got {[kind.value for kind in kinds]}'
        )
    return kinds


class ModalityExtractor(nn.Module):
    """applies each configured extractor and standardizes every plane
    with per-kind, per-channel statistics of the training split

    Statistics are buffers, so they are saved with the model and move with ``.to()``.
    Until ``fit`` is called the statistics are the identity (mean 0, std 1).

    With BAYAR among the kinds the constrained kernel is a parameter, frozen
    until the phase-1 run of the Bayar stream turns it on. Call ``project_constraints``
    after every optimizer step that updates it.
    """
    def __init__(self,
                 kinds,
                 npr_factor=2,
                 hpr_sigma=1.0,
                 srm_kernels=F.DEFAULT_SRM_KERNELS,
                 bayar_kernel=None):
        super().__init__()
        self.kinds = validate_kinds(kinds)
        self.npr_factor = npr_factor
        self.hpr_sigma = hpr_sigma
        self.srm_kernels = tuple(srm_kernels)
        for name in self.srm_kernels:
            if name not in F.SRM_KERNELS:
                raise ConfigurationError(
                    f'invalid SRM kernel name: {name}. Valid names are: {sorted(F.SRM_KERNELS)}'
                )
        if bayar_kernel is None:
            bayar_kernel = F.default_bayar_kernel()
        F.check_bayar(bayar_kernel)
        if ExtractorKind.BAYAR in self.kinds:
            self.bayar_kernel = nn.Parameter(bayar_kernel.to(torch.get_default_dtype()), requires_grad=False)
        else:
            self.bayar_kernel = bayar_kernel.to(torch.float64)

        n_kinds = len(self.kinds)
        self.register_buffer('mean', torch.zeros(n_kinds, 3))
        self.register_buffer('std', torch.ones(n_kinds, 3))
        self.register_buffer('count', torch.zeros((), dtype=torch.int64))

    @property
    def n_streams(self):
        return len(self.kinds)

    @property
    def is_fitted(self):
        return int(self.count) > 0

    @torch.no_grad()
    def project_constraints(self):
        """project a trainable Bayar kernel back onto the constraint set, frozen kernels are left bitwise alone"""
        if isinstance(self.bayar_kernel, nn.Parameter) and self.bayar_kernel.requires_grad:
            self.bayar_kernel.copy_(F.project_bayar(self.bayar_kernel).to(self.bayar_kernel.dtype))

    def index(self, kind):
        return self.kinds.index(ExtractorKind.from_str(kind))

    def extract_one(self, img, kind):
        """raw plane of one kind, before standardization"""
        if kind is ExtractorKind.IMAGE:
            return img
        elif kind is ExtractorKind.SRM:
            return F.extract_srm(img, self.srm_kernels)
        elif kind is ExtractorKind.NPR:
            return F.extract_npr(img, self.npr_factor)
        elif kind is ExtractorKind.BAYAR:
            return F.extract_bayar(img, self.bayar_kernel)
        elif kind is ExtractorKind.HPR:
            return F.extract_hpr(img, self.hpr_sigma)
        raise ConfigurationError(f'no extractor for kind: {kind}')

    def is_extracted(self, img):
        """True if ``img`` already holds raw planes of every kind, as written by ``forgerynets extract``"""
        return self.n_streams > 1 and img.shape[-3] == 3 * self.n_streams

    def extract_raw(self, img):
        """stack raw planes along a new modality axis

        Parameters
        ----------
        img : torch.Tensor
            (3, H, W) or (B, 3, H, W) RGB, or the same with 3 * (M+1) channels
            of already extracted planes, which are only reshaped

        Returns
        -------
        planes : torch.Tensor
            (M+1, 3, H, W) or (B, M+1, 3, H, W), ordered as ``self.kinds``
        """
        if img.dim() not in (3, 4) or (img.shape[-3] != 3 and not self.is_extracted(img)):
            raise DimensionError(
                f'expected RGB image (3, H, W) or (B, 3, H, W), or {3 * self.n_streams} channels '
                f'of extracted planes, got {tuple(img.shape)}'
            )
        if self.is_extracted(img):
            return img.reshape(*img.shape[:-3], self.n_streams, 3, *img.shape[-2:])
        return torch.stack([self.extract_one(img, kind) for kind in self.kinds], dim=-4)

    def standardize(self, planes):
        mean = self.mean.to(planes.dtype)[..., None, None]
        std = self.std.to(planes.dtype)[..., None, None]
        return ((planes - mean) / std).clamp(-CLAMP, CLAMP)

    def standardize_one(self, plane, kind):
        j = self.index(kind)
        mean = self.mean[j].to(plane.dtype)[:, None, None]
        std = self.std[j].to(plane.dtype)[:, None, None]
        return ((plane - mean) / std).clamp(-CLAMP, CLAMP)

    def forward(self, img):
        return self.standardize(self.extract_raw(img))

    def forward_one(self, img, kind):
        """standardized plane of a single kind, (B, 3, H, W)"""
        kind = ExtractorKind.from_str(kind)
        if self.is_extracted(img):
            j = self.index(kind)
            plane = img[..., 3 * j:3 * (j + 1), :, :]
        else:
            plane = self.extract_one(img, kind)
        return self.standardize_one(plane, kind)

    @torch.no_grad()
    def fit(self, images):
        """compute standardization statistics from an iterable of training images

        Sums are accumulated in float64, one image at a time, in iteration order.

        Parameters
        ----------
        images : iterable
            of (3, H, W) or (B, 3, H, W) tensors from the training split only
        """
        n_kinds = len(self.kinds)
        total = torch.zeros(n_kinds, 3, dtype=torch.float64)
        total_sq = torch.zeros(n_kinds, 3, dtype=torch.float64)
        n_pixels = 0
        n_images = 0
        for img in images:
            planes = self.extract_raw(img.to(torch.float64))
            if planes.dim() == 4:
                planes = planes.unsqueeze(0)
            # (B, K, 3, H, W) -> per (K, 3)
            total += planes.sum(dim=(0, 3, 4))
            total_sq += (planes ** 2).sum(dim=(0, 3, 4))
            n_pixels += planes.shape[0] * planes.shape[-2] * planes.shape[-1]
            n_images += planes.shape[0]
        if n_images == 0:
            raise DimensionError('cannot fit standardization statistics on an empty set of images')

        mean = total / n_pixels
        var = (total_sq / n_pixels - mean ** 2).clamp(min=0.)
        std = var.sqrt()
        std = torch.where(std < MIN_STD, torch.ones_like(std), std)
        self.mean.copy_(mean.to(self.mean.dtype))
        self.std.copy_(std.to(self.std.dtype))
        self.count.fill_(n_images)
        logger.info('fit standardization statistics on %d images for kinds %s',
                    n_images, [kind.value for kind in self.kinds])
        return self


def extract_all(img, kinds, extractor=None, **extractor_kwargs):
    """apply every extractor in ``kinds`` to ``img``

    If ``extractor`` is None the planes are returned raw, otherwise they are
    standardized with ``extractor``'s fitted statistics and clamped to [-4, 4].
    """
    if extractor is None:
        return ModalityExtractor(kinds, **extractor_kwargs).extract_raw(img)
    if [ExtractorKind.from_str(kind) for kind in kinds] != extractor.kinds:
        raise ConfigurationError('kinds do not match the order of the fitted extractor')
    return extractor(img)
