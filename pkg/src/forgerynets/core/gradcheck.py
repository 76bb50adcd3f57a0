"""finite-difference oracle for gradients recorded by autograd"""
import logging
import math

import torch

from ..errors import NumericalError

logger = logging.getLogger(__name__)


def _evaluate(f):
    value = f()
    if not torch.is_tensor(value) or value.numel() != 1:
        raise NumericalError('grad_check expects f to return a scalar tensor')
    if not torch.isfinite(value).all():
        raise NumericalError(f'f evaluated to a non-finite value: {value.item()}')
    return value


def _coordinates(numel, n_points, generator):
    if n_points is None or n_points >= numel:
        return range(numel)
    return torch.randperm(numel, generator=generator)[:n_points].tolist()


def grad_check(f, params, eps=1e-4, n_points=None, seed=0):
    """compare autograd gradients of ``f`` against central differences

    Parameters
    ----------
    f : callable
        takes no arguments and returns a scalar tensor. Must be deterministic.
    params : iterable of torch.Tensor
        leaf tensors with ``requires_grad=True`` that ``f`` depends on.
        Should be float64, finite differences are unreliable in 32-bit.
    eps : float
        step for the central difference. Default is 1e-4.
    n_points : int
        if given, check only this many coordinates per parameter, drawn without
        replacement from a generator seeded with ``seed``. Default is None,
        every coordinate is checked.
    seed : int
        seed for choosing coordinates when ``n_points`` is set.

    Returns
    -------
    max_rel_err : float
        maximum over every coordinate of every parameter of
        |a - n| / max(1e-8, |a| + |n|), where a is the autograd gradient
        and n = (f(theta + eps) - f(theta - eps)) / (2 eps).
    """
    params = list(params)
    for param in params:
        if param.dtype != torch.float64:
            logger.warning('grad_check on %s parameters; use float64 for a reliable check', param.dtype)

    value = _evaluate(f)
    analytic = torch.autograd.grad(value, params, allow_unused=True)
    analytic = [torch.zeros_like(p) if g is None else g.detach() for p, g in zip(params, analytic)]

    generator = torch.Generator()
    generator.manual_seed(seed)
    max_rel_err = 0.0
    with torch.no_grad():
        for param, grad in zip(params, analytic):
            flat = param.view(-1)
            flat_grad = grad.reshape(-1)
            for ind in _coordinates(flat.numel(), n_points, generator):
                orig = flat[ind].item()
                flat[ind] = orig + eps
                f_plus = _evaluate(f).item()
                flat[ind] = orig - eps
                f_minus = _evaluate(f).item()
                flat[ind] = orig
                numeric = (f_plus - f_minus) / (2 * eps)
                a = flat_grad[ind].item()
                rel_err = abs(a - numeric) / max(1e-8, abs(a) + abs(numeric))
                if not math.isfinite(rel_err):
                    raise NumericalError(f'non-finite gradient comparison at coordinate {ind}')
                max_rel_err = max(max_rel_err, rel_err)
    return max_rel_err
