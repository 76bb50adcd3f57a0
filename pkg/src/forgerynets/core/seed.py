import random

import numpy as np
import torch


def seed_everything(seed):
    """seed every random number generator used in this package and make torch deterministic"""
    random.seed(seed)
    np.random.seed(seed)
    torch.manual_seed(seed)
    torch.use_deterministic_algorithms(True)
    torch.backends.cudnn.deterministic = True
    torch.backends.cudnn.benchmark = False


def make_generator(seed):
    """returns a ``torch.Generator`` seeded with ``seed``"""
    generator = torch.Generator()
    generator.manual_seed(seed)
    return generator
