"""labelled samples of the forgery corpus"""
from enum import IntEnum

import attr
import numpy as np

from ..errors import ConfigurationError, DataError

REAL = 0
FAKE = 1


class Family(IntEnum):
    """how a sample was produced. NONE is a real image, the others are forgery families"""
    NONE = 0
    UP = 1  # upsampled from half resolution
    HF = 2  # top frequency band replaced by noise
    CB = 3  # period-2 checkerboard added

    @classmethod
    def from_str(cls, value):
        if isinstance(value, cls):
            return value
        if isinstance(value, (int, np.integer)):
            return cls(int(value))
        try:
            return cls[str(value).strip().upper()]
        except KeyError:
            raise ConfigurationError(
                f'invalid forgery family: {value}. Valid families are: {[family.name for family in cls]}'
            ) from None


FAKE_FAMILIES = (Family.UP, Family.HF, Family.CB)


def _check_image(instance, attribute, value):
    if not isinstance(value, np.ndarray) or value.ndim != 3:
        raise DataError(f'image must be a (C, H, W) numpy array, got {type(value)}')
    if value.dtype != np.float32:
        raise DataError(f'image must be float32, got {value.dtype}')


@attr.s(eq=False)
class SampleRecord:
    """one labelled image

    Attributes
    ----------
    label : int
        0 for real, 1 for fake
    family : Family
        NONE for real images
    image : numpy.ndarray
        (C, H, W) float32. C is 3 for RGB images, 3 (M+1) for extracted planes.
    """
    label = attr.ib(converter=int)
    family = attr.ib(converter=Family.from_str)
    image = attr.ib(validator=_check_image)

    def __attrs_post_init__(self):
        if self.label not in (REAL, FAKE):
            raise DataError(f'label must be 0 (real) or 1 (fake), got {self.label}')
        if (self.label == REAL) != (self.family is Family.NONE):
            raise DataError(
                f'label {self.label} is inconsistent with family {self.family.name}: '
                'real samples have family NONE and fakes any other family'
            )

    def __eq__(self, other):
        if not isinstance(other, SampleRecord):
            return NotImplemented
        return (self.label == other.label
                and self.family == other.family
                and self.image.shape == other.image.shape
                and self.image.tobytes() == other.image.tobytes())
