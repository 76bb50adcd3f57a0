"""class to represent eval section of config.ini file """
import attr

from ..transforms.functional import Distortion
from .validators import is_pos_int, one_of, optional, to_int, to_path, to_str


def is_distortion(instance, attribute, value):
    Distortion.from_str(value)


@attr.s
class EvalConfig:
    """class to represent [EVAL] section of config.ini file

    Attributes
    ----------
    ckpt_path : Path
        checkpoint of a trained detector. Default is None, in which case
        the final phase-2 checkpoint under the training save path is used.
    report : str
        one of {'text', 'csv'}. Default is 'text'.
    distortion : str
        distortion applied on the fly to every test image,
        one of {'none', 'blur', 'down', 'jpeg'}. Default is 'none'.
    dump_features : Path
        if not None, CLS features, router distributions, per-head probabilities,
        labels and families are written here with joblib. Default is None.
    batch_size : int
        Default is 64.
    results_path : Path
        where reports are written. Default is None, in which case they go
        next to the checkpoint.
    """
    ckpt_path = attr.ib(converter=optional(to_path), default=None)
    report = attr.ib(converter=to_str, validator=one_of('text', 'csv'), default='text')
    distortion = attr.ib(converter=to_str, validator=is_distortion, default='none')
    dump_features = attr.ib(converter=optional(to_path), default=None)
    batch_size = attr.ib(converter=to_int, validator=is_pos_int, default=64)
    results_path = attr.ib(converter=optional(to_path), default=None)
