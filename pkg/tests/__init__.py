from . import test_analysis
from . import test_checkpoint
from . import test_config
from . import test_core
from . import test_datasets
from . import test_extractors
from . import test_gradcheck
from . import test_main
from . import test_metrics
from . import test_nets
from . import test_router
from . import test_tensorboard
from . import test_train
from . import test_transforms
