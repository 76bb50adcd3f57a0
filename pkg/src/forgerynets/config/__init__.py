from .data import DataConfig
from .eval import EvalConfig
from .model import ModelConfig
from .parse import Config, parse_config
from .train import TrainConfig
