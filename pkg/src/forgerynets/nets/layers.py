"""building blocks shared by the backbone, the adapter and the baselines"""
import torch
import torch.nn as nn
import torch.nn.functional as F

from ..core import functional as core
from ..errors import ConfigurationError


class LayerNorm(nn.Module):
    """layer normalization over the last axis, ``forgerynets.core.layer_norm`` with learnable affine"""
    def __init__(self, dim, eps=1e-5):
        super().__init__()
        self.eps = eps
        self.weight = nn.Parameter(torch.ones(dim))
        self.bias = nn.Parameter(torch.zeros(dim))

    def forward(self, x):
        return core.layer_norm(x, self.weight, self.bias, self.eps)


class MultiHeadAttention(nn.Module):
    """query/key/value/output projections around ``forgerynets.core.multi_head_attention``.
    Keys carry no bias: a key bias only shifts every logit of a query equally and never gets a gradient"""
    def __init__(self, dim, heads):
        super().__init__()
        if dim % heads != 0:
            raise ConfigurationError(f'embedding dim {dim} is not divisible by number of heads {heads}')
        self.heads = heads
        self.q = nn.Linear(dim, dim)
        self.k = nn.Linear(dim, dim, bias=False)
        self.v = nn.Linear(dim, dim)
        self.out = nn.Linear(dim, dim)

    def params(self):
        return core.AttentionParams(w_q=self.q.weight, w_k=self.k.weight, w_v=self.v.weight, w_o=self.out.weight,
                                    b_q=self.q.bias, b_k=None, b_v=self.v.bias, b_o=self.out.bias)

    def forward(self, q, k, v):
        return core.multi_head_attention(q, k, v, self.heads, self.params())

    @torch.no_grad()
    def set_identity(self):
        """identity projections and zero biases"""
        for linear in (self.q, self.k, self.v, self.out):
            linear.weight.copy_(torch.eye(linear.weight.shape[0], dtype=linear.weight.dtype))
            if linear.bias is not None:
                linear.bias.zero_()
        return self


class FeedForward(nn.Module):
    """Linear -> GELU -> Linear

    Parameters
    ----------
    dim : int
    hidden : int
    zero_init_output : bool
        if True, the output projection starts at zero so the block adds nothing
        to a residual stream until it is trained. Default is False.
    """
    def __init__(self, dim, hidden, zero_init_output=False):
        super().__init__()
        self.fc1 = nn.Linear(dim, hidden)
        self.fc2 = nn.Linear(hidden, dim)
        if zero_init_output:
            nn.init.zeros_(self.fc2.weight)
            nn.init.zeros_(self.fc2.bias)

    def forward(self, x):
        return self.fc2(F.gelu(self.fc1(x)))
