from . import functional
from .functional import (
    AttentionParams,
    conv2d,
    layer_norm,
    matmul,
    multi_head_attention,
    scaled_dot_product_attention,
    softmax,
)
from .gradcheck import grad_check
from .seed import make_generator, seed_everything
