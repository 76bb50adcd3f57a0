"""dynamic feature selection: a softmax router over the concatenated CLS tokens
picks a mixture of per-modality classification heads"""
from typing import NamedTuple

import torch
import torch.nn as nn

from ..core import functional as core
from ..errors import ConfigurationError, DimensionError

ENTROPY_CLAMP = 1e-12
PROB_CLAMP = 1e-7

# sign applied to the entropy term of the total loss.
# 'literal' adds +H(p) and sharpens routing, 'balance' subtracts it and spreads routing
MOE_SIGNS = {
    'literal': 1.0,
    'balance': -1.0,
}


class Prediction(NamedTuple):
    """output of a detector forward pass, every field batched along axis 0"""
    p: torch.Tensor
    per_head: torch.Tensor
    fused: torch.Tensor
    argmax_modality: torch.Tensor
    cls: torch.Tensor


def route(f_cls, W, b):
    """p = softmax(F_cls W + b)

    Parameters
    ----------
    f_cls : torch.Tensor
        ((M+1) D,) or (B, (M+1) D), concatenated CLS tokens
    W : torch.Tensor
        ((M+1) D, M+1)
    b : torch.Tensor
        (M+1,)
    """
    if f_cls.shape[-1] != W.shape[0]:
        raise DimensionError(
            f'router expects concatenated CLS features of size {W.shape[0]}, got {tuple(f_cls.shape)}'
        )
    unbatched = f_cls.dim() == 1
    if unbatched:
        f_cls = f_cls.unsqueeze(0)
    p = core.softmax(core.matmul(f_cls, W) + b, dim=-1)
    return p.squeeze(0) if unbatched else p


def mixture_predict(p, per_head):
    """fused = sum_i p_i per_head_i, a convex combination of the head probabilities"""
    return (p * per_head).sum(dim=-1)


def entropy_loss(p):
    """H(p) = -sum_i p_i log p_i, averaged over the batch when ``p`` is (B, M+1)"""
    h = -(p * torch.log(p.clamp(min=ENTROPY_CLAMP))).sum(dim=-1)
    return h.mean()


def bce_loss(y, fused):
    """binary cross-entropy of fused probabilities, clamped to [1e-7, 1 - 1e-7]"""
    y = torch.as_tensor(y, dtype=fused.dtype, device=fused.device)
    fused = fused.clamp(PROB_CLAMP, 1 - PROB_CLAMP)
    loss = -(y * torch.log(fused) + (1 - y) * torch.log(1 - fused))
    return loss.mean()


def total_loss(y, fused, p, lam=0.1, moe_sign='literal'):
    """L_cls + lam * s * L_moe, with s = +1 for 'literal' and -1 for 'balance'"""
    try:
        sign = MOE_SIGNS[moe_sign]
    except KeyError:
        raise ConfigurationError(
            f"moe_sign must be one of {sorted(MOE_SIGNS)}, but was '{moe_sign}'"
        ) from None
    loss = bce_loss(y, fused)
    if lam == 0:
        return loss
    return loss + lam * sign * entropy_loss(p)


class Router(nn.Module):
    """router parameters W and b, both zero at construction so routing starts uniform"""
    def __init__(self, n_streams, dim):
        super().__init__()
        self.n_streams = n_streams
        self.dim = dim
        self.W = nn.Parameter(torch.zeros(n_streams * dim, n_streams))
        self.b = nn.Parameter(torch.zeros(n_streams))

    def forward(self, f_cls):
        return route(f_cls, self.W, self.b)


class ClassHeads(nn.ModuleList):
    """one affine head per modality; head i reads only the CLS token of stream i"""
    def __init__(self, n_streams, dim):
        super().__init__([nn.Linear(dim, 1) for _ in range(n_streams)])

    def forward(self, cls):
        """cls : (B, M+1, D) -> per-head probabilities (B, M+1)"""
        if cls.dim() != 3 or cls.shape[1] != len(self):
            raise DimensionError(f'expected CLS tokens of shape (B, {len(self)}, D), got {tuple(cls.shape)}')
        logits = [head(cls[:, i]) for i, head in enumerate(self)]
        return torch.sigmoid(torch.cat(logits, dim=1))
