"""multi-stream transformer: a frozen base shared by every modality,
per-modality patch embeddings and LoRA experts on the QKV projection,
and gated cross-modal attention at the fusion layers"""
import math

import torch
import torch.nn as nn
import torch.nn.functional as F

from ..core import functional as core
from ..errors import ConfigurationError, DimensionError
from .layers import FeedForward, LayerNorm, MultiHeadAttention


def default_fusion_layers(n_layers):
    """one quarter, one half, three quarters of the way through, and the final layer"""
    return sorted({
        math.ceil(n_layers / 4) - 1,
        math.ceil(n_layers / 2) - 1,
        math.ceil(3 * n_layers / 4) - 1,
        n_layers - 1,
    })


class PatchEmbedding(nn.Module):
    """non-overlapping P x P patches -> D-dim tokens, with a CLS token and learned positions"""
    def __init__(self, image_size, patch_size, dim, in_channels=3):
        super().__init__()
        if image_size % patch_size != 0:
            raise ConfigurationError(f'image size {image_size} is not divisible by patch size {patch_size}')
        self.image_size = image_size
        self.patch_size = patch_size
        self.in_channels = in_channels
        self.n_patches = (image_size // patch_size) ** 2
        self.proj = nn.Linear(in_channels * patch_size ** 2, dim)
        self.cls = nn.Parameter(torch.randn(dim) * 0.02)
        self.pos = nn.Parameter(torch.randn(1 + self.n_patches, dim) * 0.02)

    def patch_tokens(self, x):
        """projected patches in row-major order, before CLS and positions"""
        if x.dim() != 4 or x.shape[1:] != (self.in_channels, self.image_size, self.image_size):
            raise DimensionError(
                f'expected input (B, {self.in_channels}, {self.image_size}, {self.image_size}), got {tuple(x.shape)}'
            )
        patches = F.unfold(x, kernel_size=self.patch_size, stride=self.patch_size)
        return self.proj(patches.transpose(1, 2))

    def forward(self, x):
        tokens = self.patch_tokens(x)
        cls = self.cls.expand(x.shape[0], 1, -1)
        return torch.cat([cls, tokens], dim=1) + self.pos


class LoraExpert(nn.Module):
    """low-rank delta (alpha / r) B A on the QKV projection. B starts at zero, so the delta does too"""
    def __init__(self, dim, rank=4, alpha=8.0):
        super().__init__()
        self.rank = rank
        self.scale = alpha / rank
        self.A = nn.Parameter(torch.randn(rank, dim) / math.sqrt(dim))
        self.B = nn.Parameter(torch.zeros(3 * dim, rank))

    def forward(self, h):
        return self.scale * F.linear(F.linear(h, self.A), self.B)


class FrozenBlock(nn.Module):
    """pre-LN transformer block. Its own weights never train; a LoRA expert may be added to QKV"""
    def __init__(self, dim, heads, ffn_hidden):
        super().__init__()
        if dim % heads != 0:
            raise ConfigurationError(f'embedding dim {dim} is not divisible by number of heads {heads}')
        self.dim = dim
        self.heads = heads
        self.ln1 = LayerNorm(dim)
        self.qkv = nn.Linear(dim, 3 * dim)
        self.proj = nn.Linear(dim, dim)
        self.ln2 = LayerNorm(dim)
        self.ffn = FeedForward(dim, ffn_hidden)

    def lora_qkv(self, h, lora=None):
        qkv = self.qkv(h)
        if lora is not None:
            qkv = qkv + lora(h)
        return qkv

    def forward(self, x, lora=None):
        qkv = self.lora_qkv(self.ln1(x), lora)
        q, k, v = qkv.split(self.dim, dim=-1)
        x = x + self.proj(core.scaled_dot_product_attention(q, k, v, self.heads))
        return x + self.ffn(self.ln2(x))


class BaseTransformer(nn.Module):
    """stack of frozen blocks plus the final LayerNorm applied before CLS extraction

    Weights are drawn from a generator seeded with ``seed``, so every model built
    with the same seed and shape shares the same base bitwise.
    """
    def __init__(self, dim, layers, heads, ffn_hidden, seed=0):
        super().__init__()
        self.blocks = nn.ModuleList([FrozenBlock(dim, heads, ffn_hidden) for _ in range(layers)])
        self.norm = LayerNorm(dim)
        self.reset_parameters(seed)
        self.requires_grad_(False)

    @torch.no_grad()
    def reset_parameters(self, seed):
        generator = torch.Generator()
        generator.manual_seed(seed)
        for module in self.modules():
            if isinstance(module, nn.Linear):
                fan_in = module.weight.shape[1]
                module.weight.copy_(torch.randn(module.weight.shape, generator=generator) / math.sqrt(fan_in))
                module.bias.zero_()

    def forward(self, x):
        """plain frozen pass of one stream, no experts"""
        for block in self.blocks:
            x = block(x)
        return self.norm(x)


class CrossLowLevelAttention(nn.Module):
    """gated self-attention over the concatenated tokens of every modality,
    x + beta * MHA(LN(x), LN(x), LN(x)); beta starts at zero

    Parameters
    ----------
    dim : int
    heads : int
    n_tokens : int
        tokens per stream, 1 + L
    n_streams : int
        M + 1
    per_modality_gate : bool
        if True, every stream gets its own (1 + L) x D gate.
        Default is False, one gate tiled across the streams.
    """
    def __init__(self, dim, heads, n_tokens, n_streams, per_modality_gate=False):
        super().__init__()
        self.norm = LayerNorm(dim)
        self.attn = MultiHeadAttention(dim, heads)
        gate_shape = (n_streams, n_tokens, dim) if per_modality_gate else (n_tokens, dim)
        self.beta = nn.Parameter(torch.zeros(gate_shape))

    def forward(self, x):
        """x : (B, M+1, 1+L, D)"""
        b, s, t, d = x.shape
        h = self.norm(x.reshape(b, s * t, d))
        y = self.attn(h, h, h).reshape(b, s, t, d)
        return x + self.beta * y


class Backbone(nn.Module):
    """parallel per-modality streams through a shared frozen base

    Parameters
    ----------
    streams : list
        of str, one name per modality, in the order of the modality axis
    image_size : int
    patch_size : int
    dim : int
    layers : int
    heads : int
    lora_rank : int
    lora_alpha : float
    fusion_layers : list
        of layer indices. Default is None, in which case ``default_fusion_layers(layers)`` is used.
    use_lora : bool
        if False, LoRA deltas are skipped and the experts are frozen
    use_cross_attention : bool
        if False, fusion layers are the identity and no fusion parameters exist
    per_modality_gate : bool
    base_seed : int
        seed of the frozen base weights
    ffn_ratio : int
        FFN hidden width as a multiple of ``dim``
    """
    def __init__(self,
                 streams,
                 image_size=32,
                 patch_size=4,
                 dim=32,
                 layers=4,
                 heads=4,
                 lora_rank=4,
                 lora_alpha=8.0,
                 fusion_layers=None,
                 use_lora=True,
                 use_cross_attention=True,
                 per_modality_gate=False,
                 base_seed=0,
                 ffn_ratio=4):
        super().__init__()
        if fusion_layers is None:
            fusion_layers = default_fusion_layers(layers)
        fusion_layers = sorted(set(fusion_layers))
        if any(layer < 0 or layer >= layers for layer in fusion_layers):
            raise ConfigurationError(f'fusion layers {fusion_layers} must lie in [0, {layers - 1}]')

        self.streams = list(streams)
        self.dim = dim
        self.n_layers = layers
        self.fusion_layers = fusion_layers
        self.use_lora = use_lora
        self.use_cross_attention = use_cross_attention

        self.base = BaseTransformer(dim, layers, heads, ffn_ratio * dim, seed=base_seed)
        self.embed = nn.ModuleDict({
            name: PatchEmbedding(image_size, patch_size, dim) for name in self.streams
        })
        n_tokens = 1 + self.embed[self.streams[0]].n_patches
        self.n_tokens = n_tokens
        self.lora = nn.ModuleDict({
            name: nn.ModuleList([LoraExpert(dim, lora_rank, lora_alpha) for _ in range(layers)])
            for name in self.streams
        })
        if not use_lora:
            self.lora.requires_grad_(False)
        if use_cross_attention:
            self.fuse = nn.ModuleDict({
                str(layer): CrossLowLevelAttention(dim, heads, n_tokens, len(self.streams), per_modality_gate)
                for layer in fusion_layers
            })
        else:
            self.fuse = None

    def _expert(self, name, layer):
        return self.lora[name][layer] if self.use_lora else None

    def forward_stream(self, plane, name):
        """one stream through its embedding and experts, without fusion

        Returns
        -------
        tokens : torch.Tensor
            (B, 1+L, D) after the final LayerNorm
        """
        x = self.embed[name](plane)
        for layer, block in enumerate(self.base.blocks):
            x = block(x, self._expert(name, layer))
        return self.base.norm(x)

    def forward(self, planes, adapter=None, g=None):
        """
        Parameters
        ----------
        planes : torch.Tensor
            (B, M+1, 3, H, W), modality axis ordered as ``self.streams``
        adapter : LowLevelAdapter
            optional. Injects ``g`` before and extracts it back after each fusion layer.
        g : torch.Tensor
            (B, D) pooled low-level prior, required with ``adapter``

        Returns
        -------
        tokens : torch.Tensor
            (B, M+1, 1+L, D)
        cls : torch.Tensor
            (B, M+1, D), token 0 of every stream
        """
        if planes.dim() != 5 or planes.shape[1] != len(self.streams):
            raise DimensionError(
                f'expected planes of shape (B, {len(self.streams)}, 3, H, W), got {tuple(planes.shape)}'
            )
        # streams stay separate outside fusion layers so each matches an independent pass exactly
        xs = [self.embed[name](planes[:, j]) for j, name in enumerate(self.streams)]
        for layer, block in enumerate(self.base.blocks):
            xs = [block(x, self._expert(name, layer)) for x, name in zip(xs, self.streams)]
            if layer in self.fusion_layers and (adapter is not None or self.fuse is not None):
                x = torch.stack(xs, dim=1)
                if adapter is not None:
                    x = adapter.inject_at(x, g, layer)
                if self.fuse is not None:
                    x = self.fuse[str(layer)](x)
                if adapter is not None:
                    g = adapter.extract_back(g, x, layer)
                xs = list(x.unbind(dim=1))
        tokens = torch.stack([self.base.norm(x) for x in xs], dim=1)
        return tokens, tokens[:, :, 0]
