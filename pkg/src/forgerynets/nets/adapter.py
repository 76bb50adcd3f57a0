"""convolutional side branch that condenses the low-level planes into one prior vector G
and trades information with the backbone at every fusion layer"""
import torch
import torch.nn as nn

from ..errors import DimensionError
from .layers import FeedForward, LayerNorm, MultiHeadAttention


def _conv_block(in_channels, out_channels):
    return nn.Sequential(
        nn.Conv2d(in_channels, out_channels, kernel_size=3, padding=1),
        nn.GroupNorm(1, out_channels),
        nn.GELU(),
        nn.AvgPool2d(2),
    )


class LowLevelEncoder(nn.Module):
    """two conv blocks, global average pooling, two 1x1 projections to ``dim``

    Parameters
    ----------
    n_lowlevel : int
        M, number of low-level streams. Input has 3 M channels.
    dim : int
    channels : tuple
        widths of the two conv blocks. Default is (16, 32).
    """
    def __init__(self, n_lowlevel, dim, channels=(16, 32)):
        super().__init__()
        self.in_channels = 3 * n_lowlevel
        c1, c2 = channels
        self.features = nn.Sequential(
            _conv_block(self.in_channels, c1),
            _conv_block(c1, c2),
        )
        self.pool = nn.AdaptiveAvgPool2d(1)
        self.project = nn.Sequential(
            nn.Conv2d(c2, dim, kernel_size=1),
            nn.GELU(),
            nn.Conv2d(dim, dim, kernel_size=1),
        )

    def forward(self, x):
        """x : (B, 3M, H, W) -> (B, D)"""
        if x.dim() != 4 or x.shape[1] != self.in_channels:
            raise DimensionError(f'expected (B, {self.in_channels}, H, W) low-level planes, got {tuple(x.shape)}')
        x = self.pool(self.features(x))
        return torch.flatten(self.project(x), 1)


class Injector(nn.Module):
    """F + gamma * MHA(LN(F), LN(G), LN(G)): every backbone token reads the single prior token"""
    def __init__(self, dim, heads):
        super().__init__()
        self.norm_tokens = LayerNorm(dim)
        self.norm_prior = LayerNorm(dim)
        self.attn = MultiHeadAttention(dim, heads)
        self.gamma = nn.Parameter(torch.zeros(dim))

    def forward(self, x, g):
        """x : (B, M+1, 1+L, D), g : (B, D)"""
        b, s, t, d = x.shape
        flat = x.reshape(b, s * t, d)
        prior = self.norm_prior(g).unsqueeze(1)
        y = self.attn(self.norm_tokens(flat), prior, prior)
        return (flat + self.gamma * y).reshape(b, s, t, d)


class FeatureExtractor(nn.Module):
    """G~ = G + eta * MHA(LN(G), LN(F), LN(F)); G' = G~ + FFN(LN(G~)).
    eta and the FFN output projection start at zero"""
    def __init__(self, dim, heads, ffn_hidden):
        super().__init__()
        self.norm_prior = LayerNorm(dim)
        self.norm_tokens = LayerNorm(dim)
        self.attn = MultiHeadAttention(dim, heads)
        self.eta = nn.Parameter(torch.zeros(dim))
        self.norm_ffn = LayerNorm(dim)
        self.ffn = FeedForward(dim, ffn_hidden, zero_init_output=True)

    def forward(self, g, x):
        """g : (B, D), x : (B, M+1, 1+L, D)"""
        b, s, t, d = x.shape
        tokens = self.norm_tokens(x.reshape(b, s * t, d))
        y = self.attn(self.norm_prior(g).unsqueeze(1), tokens, tokens).squeeze(1)
        g = g + self.eta * y
        return g + self.ffn(self.norm_ffn(g))


class LowLevelAdapter(nn.Module):
    """encoder plus one injector / extractor pair per fusion layer"""
    def __init__(self, n_lowlevel, dim, heads, fusion_layers, channels=(16, 32), ffn_ratio=2):
        super().__init__()
        self.fusion_layers = sorted(fusion_layers)
        self.encoder = LowLevelEncoder(n_lowlevel, dim, channels)
        self.inject = nn.ModuleDict({
            str(layer): Injector(dim, heads) for layer in self.fusion_layers
        })
        self.extract = nn.ModuleDict({
            str(layer): FeatureExtractor(dim, heads, ffn_ratio * dim) for layer in self.fusion_layers
        })

    def encode(self, lowlevel):
        """lowlevel : (B, M, 3, H, W), every stream except IMAGE -> G_0 : (B, D)"""
        b, m, c, h, w = lowlevel.shape
        return self.encoder(lowlevel.reshape(b, m * c, h, w))

    def inject_at(self, x, g, layer):
        return self.inject[str(layer)](x, g)

    def extract_back(self, g, x, layer):
        return self.extract[str(layer)](g, x)
