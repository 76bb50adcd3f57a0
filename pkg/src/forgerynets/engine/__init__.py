from .abstract_trainer import AbstractTrainer
from .fusion_trainer import FusionTrainer, base_snapshot, check_base_unchanged, load_phase1
from .tester import Tester
from .trainer import EncoderTrainer, ExpertTrainer
