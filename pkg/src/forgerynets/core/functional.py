"""validated tensor primitives every model in this package is built from

All functions take and return ``torch.Tensor``; gradients are recorded
by torch autograd. Shapes are checked up front so a mismatch names both
operands instead of failing deep inside a kernel.

Convolution follows the cross-correlation convention (kernels are not flipped).
"""
import math

import torch
import torch.nn.functional as F

from ..errors import ConfigurationError, DimensionError

__all__ = [
    'AttentionParams',
    'conv2d',
    'layer_norm',
    'matmul',
    'multi_head_attention',
    'scaled_dot_product_attention',
    'softmax',
]


def _shape(t):
    return tuple(t.shape)


def matmul(a, b):
    """matrix product of ``a`` (..., m, k) and ``b`` (..., k, n)"""
    if a.dim() < 2 or b.dim() < 2:
        raise DimensionError(
            f'matmul expects operands with at least 2 dimensions, got {_shape(a)} and {_shape(b)}'
        )
    if a.shape[-1] != b.shape[-2]:
        raise DimensionError(
            f'matmul inner extents do not match: {_shape(a)} and {_shape(b)}'
        )
    return torch.matmul(a, b)


def softmax(x, dim=-1):
    """softmax along ``dim``; torch subtracts the row maximum before exponentiating,
    so large logits do not overflow"""
    return torch.softmax(x, dim=dim)


def layer_norm(x, gain, bias, eps=1e-5):
    """normalize over the last axis to zero mean and unit variance, then apply ``gain`` and ``bias``"""
    if eps <= 0:
        raise ConfigurationError(f'layer_norm eps must be positive, but was {eps}')
    d = x.shape[-1]
    if gain.shape != (d,) or bias.shape != (d,):
        raise DimensionError(
            f'layer_norm gain {_shape(gain)} and bias {_shape(bias)} must both be ({d},) for input {_shape(x)}'
        )
    return F.layer_norm(x, (d,), gain, bias, eps)


def scaled_dot_product_attention(q, k, v, heads):
    """attention over already-projected queries, keys and values

    Parameters
    ----------
    q : torch.Tensor
        (..., Tq, D)
    k, v : torch.Tensor
        (..., Tk, D)
    heads : int
        number of heads; D must be divisible by it

    Returns
    -------
    out : torch.Tensor
        (..., Tq, D), heads concatenated along the last axis
    """
    d = q.shape[-1]
    if d % heads != 0:
        raise ConfigurationError(f'embedding dim {d} is not divisible by number of heads {heads}')
    if k.shape[-1] != d or v.shape[-1] != d:
        raise DimensionError(
            f'query {_shape(q)}, key {_shape(k)} and value {_shape(v)} must share the last extent'
        )
    if k.shape[-2] != v.shape[-2]:
        raise DimensionError(f'key {_shape(k)} and value {_shape(v)} must have the same number of tokens')
    head_dim = d // heads

    def split(t):
        # (..., T, D) -> (..., heads, T, head_dim)
        return t.reshape(*t.shape[:-1], heads, head_dim).transpose(-3, -2)

    qh, kh, vh = split(q), split(k), split(v)
    logits = matmul(qh, kh.transpose(-2, -1)) / math.sqrt(head_dim)
    weights = softmax(logits, dim=-1)
    out = matmul(weights, vh)
    return out.transpose(-3, -2).reshape(*q.shape[:-1], d)


class AttentionParams:
    """query, key, value and output projections for ``multi_head_attention``

    Each weight is (D, D) in ``torch.nn.functional.linear`` layout (out, in),
    each bias is (D,) or ``None``.
    """
    __slots__ = ('w_q', 'b_q', 'w_k', 'b_k', 'w_v', 'b_v', 'w_o', 'b_o')

    def __init__(self, w_q, w_k, w_v, w_o, b_q=None, b_k=None, b_v=None, b_o=None):
        self.w_q, self.w_k, self.w_v, self.w_o = w_q, w_k, w_v, w_o
        self.b_q, self.b_k, self.b_v, self.b_o = b_q, b_k, b_v, b_o

    @classmethod
    def identity(cls, dim, dtype=torch.float32):
        eye = torch.eye(dim, dtype=dtype)
        return cls(eye, eye.clone(), eye.clone(), eye.clone())


def multi_head_attention(q, k, v, heads, params):
    """project queries/keys/values, attend per head, concatenate, project the output"""
    d = q.shape[-1]
    if params.w_q.shape != (d, d):
        raise DimensionError(f'query projection {_shape(params.w_q)} does not match embedding dim {d}')
    qp = F.linear(q, params.w_q, params.b_q)
    kp = F.linear(k, params.w_k, params.b_k)
    vp = F.linear(v, params.w_v, params.b_v)
    attended = scaled_dot_product_attention(qp, kp, vp, heads)
    return F.linear(attended, params.w_o, params.b_o)


def conv2d(x, kernels, bias=None, stride=1, pad=0, padding_mode='zeros'):
    """2-D cross-correlation

    Parameters
    ----------
    x : torch.Tensor
        (C_in, H, W) or (B, C_in, H, W)
    kernels : torch.Tensor
        (C_out, C_in / groups, kh, kw)
    bias : torch.Tensor
        optional (C_out,)
    stride : int
    pad : int
        padding on every side
    padding_mode : str
        one of {'zeros', 'reflect', 'replicate'}

    Returns
    -------
    out : torch.Tensor
        (C_out, H', W') or (B, C_out, H', W'), H' = floor((H + 2 pad - kh) / stride) + 1
    """
    unbatched = x.dim() == 3
    if unbatched:
        x = x.unsqueeze(0)
    if x.dim() != 4 or kernels.dim() != 4:
        raise DimensionError(f'conv2d expects (B, C, H, W) input and 4-D kernels, got {_shape(x)} and {_shape(kernels)}')
    c_in = x.shape[1]
    if c_in % kernels.shape[1] != 0:
        raise DimensionError(f'input channels of {_shape(x)} are incompatible with kernels {_shape(kernels)}')
    groups = c_in // kernels.shape[1]
    kh, kw = kernels.shape[-2:]
    h, w = x.shape[-2:]
    if kh > h + 2 * pad or kw > w + 2 * pad:
        raise DimensionError(
            f'kernel {_shape(kernels)} is larger than padded input {_shape(x)} with pad={pad}'
        )
    if pad > 0:
        if padding_mode == 'zeros':
            x = F.pad(x, (pad, pad, pad, pad))
        elif padding_mode in ('reflect', 'replicate'):
            if padding_mode == 'reflect' and (pad >= h or pad >= w):
                raise DimensionError(f'reflection padding {pad} needs input larger than the pad, got {_shape(x)}')
            x = F.pad(x, (pad, pad, pad, pad), mode=padding_mode)
        else:
            raise ConfigurationError(f'invalid padding_mode: {padding_mode}')
    out = F.conv2d(x, kernels, bias=bias, stride=stride, groups=groups)
    if unbatched:
        out = out.squeeze(0)
    return out
