"""class to represent data section of config.ini file """
import attr
from attr import validators
from attr.validators import instance_of

from ..datasets.records import FAKE_FAMILIES, Family
from ..errors import ConfigurationError
from ..transforms.functional import Distortion, DistortionConfig
from .validators import (
    is_list_of_str,
    is_non_neg,
    is_non_neg_int,
    is_pos,
    is_pos_int,
    is_ratio,
    optional,
    to_float,
    to_int,
    to_list,
    to_path,
    to_str,
)


def is_list_of_families(instance, attribute, value):
    is_list_of_str(instance, attribute, value)
    for name in value:
        if Family.from_str(name) not in FAKE_FAMILIES:
            raise ConfigurationError(
                f'{attribute.name} must only list forgery families {[f.name for f in FAKE_FAMILIES]}, got {name}'
            )


def is_distortion(instance, attribute, value):
    Distortion.from_str(value)


def is_quality(instance, attribute, value):
    if not 1 <= value <= 100:
        raise ConfigurationError(f'{attribute.name} must be in [1, 100], but was {value}')


@attr.s
class DataConfig:
    """class to represent [DATA] section of config.ini file

    Attributes
    ----------
    train_path : Path
        dataset file written by ``forgerynets gen-data`` used for training.
        Default is None, in which case a training split is generated from
        ``seed``, ``n_real``, ``n_fake`` and ``families``.
    test_path : Path
        dataset file used for evaluation. Default is None, in which case a test
        split is generated from ``seed + 1``, ``test_n_real``, ``test_n_fake``
        and ``test_families``.
    seed : int
        seed of generated splits. Default is 0.
    n_real : int
        real samples in a generated training split. Default is 1000.
    n_fake : int
        fakes per family in a generated training split. Default is 1000.
    families : list
        forgery families in a generated training split. Default is ['UP'],
        mirroring training on a single generator.
    test_n_real : int
        Default is 600.
    test_n_fake : int
        fakes per family in a generated test split. Default is 600.
    test_families : list
        Default is ['UP', 'HF', 'CB'].
    crop_size : int
        side of the grid-aligned crop, padded back to the image size. Default is 28.
    distortion : str
        distortion applied to every generated sample, one of {'none', 'blur', 'down', 'jpeg'}.
        Default is 'none'.
    cb_amplitude : float
        amplitude of the checkerboard trace. Default is 0.02.
    hf_gain : float
        loudness of the replacement noise of the HF family relative to the band it replaces. Default is 2.
    hf_floor : float
        lower bound on the band RMS the HF gain is applied to. Default is 0.01.
    hf_cutoff : float
        Chebyshev frequency radius, in cycles per pixel, above which HF replaces content. Default is 0.375.
    blur_sigma : float
        Default is 1.0.
    down_ratio : float
        Default is 0.5.
    jpeg_quality : int
        Default is 95.
    n_jobs : int
        joblib workers for corpus generation. Output does not depend on it. Default is 1.
    """
    train_path = attr.ib(converter=optional(to_path), default=None)
    test_path = attr.ib(converter=optional(to_path), default=None)
    seed = attr.ib(converter=to_int, validator=is_non_neg_int, default=0)
    n_real = attr.ib(converter=to_int, validator=is_non_neg_int, default=1000)
    n_fake = attr.ib(converter=to_int, validator=is_non_neg_int, default=1000)
    families = attr.ib(converter=to_list, validator=is_list_of_families, factory=lambda: ['UP'])
    test_n_real = attr.ib(converter=to_int, validator=is_non_neg_int, default=600)
    test_n_fake = attr.ib(converter=to_int, validator=is_non_neg_int, default=600)
    test_families = attr.ib(converter=to_list, validator=is_list_of_families, factory=lambda: ['UP', 'HF', 'CB'])
    crop_size = attr.ib(converter=to_int, validator=is_pos_int, default=28)
    distortion = attr.ib(converter=to_str, validator=is_distortion, default='none')
    cb_amplitude = attr.ib(converter=to_float, validator=is_non_neg, default=0.02)
    hf_gain = attr.ib(converter=to_float, validator=is_pos, default=2.0)
    hf_floor = attr.ib(converter=to_float, validator=is_non_neg, default=0.01)
    hf_cutoff = attr.ib(converter=to_float, validator=is_ratio, default=0.375)
    blur_sigma = attr.ib(converter=to_float, validator=is_pos, default=1.0)
    down_ratio = attr.ib(converter=to_float, validator=is_ratio, default=0.5)
    jpeg_quality = attr.ib(converter=to_int, validator=is_quality, default=95)
    n_jobs = attr.ib(converter=to_int, validator=validators.optional(instance_of(int)), default=1)

    def trace_kwargs(self):
        """keyword arguments of ``forgerynets.datasets.forge``"""
        return {
            'cb_amplitude': self.cb_amplitude,
            'hf_gain': self.hf_gain,
            'hf_floor': self.hf_floor,
            'hf_cutoff': self.hf_cutoff,
        }

    def distortion_config(self, kind=None):
        """DistortionConfig of ``kind`` with this section's parameters, default is ``self.distortion``"""
        return DistortionConfig(kind=self.distortion if kind is None else kind,
                                blur_sigma=self.blur_sigma,
                                down_ratio=self.down_ratio,
                                jpeg_quality=self.jpeg_quality)
