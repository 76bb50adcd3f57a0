"""finite-difference gradient checks of the primitives and of the whole detector, in 64 bit"""
import logging

import pandas as pd
import torch

from .core import AttentionParams, functional as F, grad_check, make_generator
from .errors import ConfigurationError, NumericalError
from .nets import ForgeryDetector, entropy_loss, route, total_loss

logger = logging.getLogger(__name__)

TOLERANCE = 1e-4

# central-difference step
EPS = 1e-4

# standard deviation of the random values given to every phase-2 parameter,
# so zero-initialized gates and LoRA factors are exercised too
PARAM_STD = 0.4

DIMS = {
    'tiny': dict(kinds=('image', 'srm', 'npr'),
                 image_size=16,
                 patch_size=8,
                 dim=8,
                 layers=2,
                 heads=4,
                 lora_rank=2,
                 lora_alpha=4.0,
                 adapter_channels=(4, 8)),
    'small': dict(kinds=('image', 'srm', 'npr', 'bayar'),
                  image_size=16,
                  patch_size=4,
                  dim=16,
                  layers=4,
                  heads=4,
                  lora_rank=4,
                  lora_alpha=8.0,
                  adapter_channels=(8, 16)),
}


def _randn(generator, *shape):
    return torch.randn(*shape, generator=generator, dtype=torch.float64)


def _leaf(generator, *shape):
    return _randn(generator, *shape).requires_grad_(True)


def op_checks(seed=0, eps=EPS, n_points=None):
    """max relative error of each primitive, each reduced to a scalar by a fixed random projection

    Returns
    -------
    errors : dict
        check name -> max relative error
    """
    generator = make_generator(seed)
    errors = {}

    a, b = _leaf(generator, 3, 4), _leaf(generator, 4, 5)
    w = _randn(generator, 3, 5)
    errors['matmul'] = grad_check(lambda: (F.matmul(a, b) * w).sum(), [a, b], eps, n_points, seed)

    x = _leaf(generator, 4, 6)
    w = _randn(generator, 4, 6)
    errors['softmax'] = grad_check(lambda: (F.softmax(x) * w).sum(), [x], eps, n_points, seed)

    x, gain, bias = _leaf(generator, 5, 8), _leaf(generator, 8), _leaf(generator, 8)
    w = _randn(generator, 5, 8)
    errors['layer_norm'] = grad_check(lambda: (F.layer_norm(x, gain, bias) * w).sum(),
                                      [x, gain, bias], eps, n_points, seed)

    q, k, v = _leaf(generator, 2, 5, 8), _leaf(generator, 2, 6, 8), _leaf(generator, 2, 6, 8)
    w = _randn(generator, 2, 5, 8)
    errors['attention'] = grad_check(lambda: (F.scaled_dot_product_attention(q, k, v, 4) * w).sum(),
                                     [q, k, v], eps, n_points, seed)

    weights = [_leaf(generator, 8, 8) for _ in range(4)]
    params = AttentionParams(*weights)
    w = _randn(generator, 2, 5, 8)
    errors['multi_head_attention'] = grad_check(
        lambda: (F.multi_head_attention(q, k, v, 4, params) * w).sum(), [q, k, v] + weights, eps, n_points, seed
    )

    x, kernels, conv_bias = _leaf(generator, 2, 3, 6, 6), _leaf(generator, 4, 3, 3, 3), _leaf(generator, 4)
    w = _randn(generator, 2, 4, 6, 6)
    errors['conv2d'] = grad_check(lambda: (F.conv2d(x, kernels, conv_bias, pad=1) * w).sum(),
                                  [x, kernels, conv_bias], eps, n_points, seed)

    f_cls, router_w, router_b = _leaf(generator, 4, 3 * 8), _leaf(generator, 3 * 8, 3), _leaf(generator, 3)
    errors['router_entropy'] = grad_check(lambda: entropy_loss(route(f_cls, router_w, router_b)),
                                          [f_cls, router_w, router_b], eps, n_points, seed)
    return errors


def randomize_trainable(model, generator, std=PARAM_STD):
    """replace every parameter that trains in phase 2 with random values"""
    names = model.set_phase(2)
    with torch.no_grad():
        for name, param in model.named_parameters():
            if param.requires_grad:
                param.copy_(torch.randn(param.shape, generator=generator, dtype=param.dtype) * std)
    return names


def model_check(dims='tiny', seed=0, eps=EPS, n_points=None, batch_size=1):
    """max relative error of the phase-2 total loss of a float64 detector on ``batch_size`` random images
    with respect to every parameter that trains in phase 2"""
    if dims not in DIMS:
        raise ConfigurationError(f'invalid dims: {dims}. Must be one of {list(DIMS)}')
    torch.manual_seed(seed)
    model = ForgeryDetector(**DIMS[dims]).double()
    generator = make_generator(seed)
    randomize_trainable(model, generator)

    image_size = DIMS[dims]['image_size']
    img = torch.rand(batch_size, 3, image_size, image_size, generator=generator, dtype=torch.float64)
    target = torch.tensor([float(i % 2) for i in range(batch_size)], dtype=torch.float64)

    def loss():
        pred = model(img)
        return total_loss(target, pred.fused, pred.p, lam=0.1)

    params = [param for param in model.parameters() if param.requires_grad]
    return grad_check(loss, params, eps, n_points, seed)


def gradcheck(dims='tiny', seed=0, eps=EPS, n_points=None, tolerance=TOLERANCE):
    """run every per-op check and the end-to-end check

    Returns
    -------
    df : pandas.DataFrame
        one row per check with its max relative error

    Raises
    ------
    NumericalError
        if any check reaches ``tolerance``
    """
    errors = op_checks(seed=seed, eps=eps, n_points=n_points)
    errors[f'detector_{dims}'] = model_check(dims=dims, seed=seed, eps=eps, n_points=n_points)
    df = pd.DataFrame({'check': list(errors), 'max_rel_err': list(errors.values())})
    max_rel_err = df['max_rel_err'].max()
    logger.info('gradient checks:\n%s', df.to_string(index=False))
    if not max_rel_err < tolerance:
        failed = df.loc[df['max_rel_err'] >= tolerance, 'check'].tolist()
        raise NumericalError(f'max rel err {max_rel_err:.3e} is not below {tolerance:g}, failed checks: {failed}')
    return df
