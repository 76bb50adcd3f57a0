from .functional import *
from .transforms import *
from .util import get_transforms
