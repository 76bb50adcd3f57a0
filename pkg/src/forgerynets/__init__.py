from .__about__ import (
    __author__,
    __commit__,
    __copyright__,
    __email__,
    __license__,
    __summary__,
    __title__,
    __uri__,
    __version__,
)

from . import analysis
from . import checkpoint
from . import config
from . import core
from . import data
from . import datasets
from . import engine
from . import errors
from . import extractors
from . import nets
from . import tensorboard
from . import transforms
from . import utils

from .ablate import ablate
from .baseline import baseline
from .evaluate import evaluate
from .gradcheck import gradcheck
from .train import train
