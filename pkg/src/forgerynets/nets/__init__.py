from . import adapter
from . import backbone
from . import baselines
from . import detector
from . import layers
from . import router
from .adapter import LowLevelAdapter, LowLevelEncoder
from .backbone import Backbone, LoraExpert, default_fusion_layers
from .baselines import EarlyFusionNet, freeze_for_late_fusion, late_fusion_config, late_fusion_detector
from .detector import DEFAULT_KINDS, ENCODER, ForgeryDetector
from .router import (
    ClassHeads,
    Prediction,
    Router,
    bce_loss,
    entropy_loss,
    mixture_predict,
    route,
    total_loss,
)
