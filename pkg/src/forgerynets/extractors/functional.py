"""low-level information planes extracted from an RGB image

Every function maps a (3, H, W) or (B, 3, H, W) tensor to a tensor of the same shape.
The residual filters are evaluated as a weighted sum of differences to the center pixel,
sum_i K_i (x_i - x_c), which equals the plain cross-correlation for kernels whose taps
sum to zero and returns exactly zero on constant images in any precision.
"""
import math

import torch
import torch.nn.functional as F

from ..errors import ContractError, DimensionError

__all__ = [
    'SRM_KERNELS',
    'DEFAULT_SRM_KERNELS',
    'check_bayar',
    'default_bayar_kernel',
    'extract_bayar',
    'extract_hpr',
    'extract_npr',
    'extract_srm',
    'gaussian_kernel1d',
    'gaussian_kernel2d',
    'project_bayar',
]


def _kernel(rows, normalizer):
    return torch.tensor(rows, dtype=torch.float64) / normalizer


# 5x5 residual kernels from the spatial rich model, keyed by name
SRM_KERNELS = {
    'kb': _kernel([[0, 0, 0, 0, 0],
                   [0, -1, 2, -1, 0],
                   [0, 2, -4, 2, 0],
                   [0, -1, 2, -1, 0],
                   [0, 0, 0, 0, 0]], 4),
    'kv': _kernel([[-1, 2, -2, 2, -1],
                   [2, -6, 8, -6, 2],
                   [-2, 8, -12, 8, -2],
                   [2, -6, 8, -6, 2],
                   [-1, 2, -2, 2, -1]], 12),
    'second_order': _kernel([[0, 0, 0, 0, 0],
                             [0, 0, 0, 0, 0],
                             [0, 1, -2, 1, 0],
                             [0, 0, 0, 0, 0],
                             [0, 0, 0, 0, 0]], 2),
    'second_order_vertical': _kernel([[0, 0, 0, 0, 0],
                                      [0, 0, 1, 0, 0],
                                      [0, 0, -2, 0, 0],
                                      [0, 0, 1, 0, 0],
                                      [0, 0, 0, 0, 0]], 2),
    'first_order': _kernel([[0, 0, 0, 0, 0],
                            [0, 0, 0, 0, 0],
                            [0, 0, -1, 1, 0],
                            [0, 0, 0, 0, 0],
                            [0, 0, 0, 0, 0]], 1),
}

# one kernel per output channel
DEFAULT_SRM_KERNELS = ('kb', 'kv', 'second_order')


def _as_batch(img):
    if img.dim() == 3:
        return img.unsqueeze(0), True
    if img.dim() == 4:
        return img, False
    raise DimensionError(f'expected image of shape (C, H, W) or (B, C, H, W), got {tuple(img.shape)}')


def _centered_correlate(img, kernels):
    """sum_i K_i (x_i - x_c) over each k x k window, reflection padding

    Parameters
    ----------
    img : torch.Tensor
        (C, H, W) or (B, C, H, W)
    kernels : torch.Tensor
        (C, k, k), one odd-sized kernel per channel
    """
    x, unbatched = _as_batch(img)
    b, c, h, w = x.shape
    k = kernels.shape[-1]
    if kernels.shape != (c, k, k) or k % 2 != 1:
        raise DimensionError(f'expected {c} odd square kernels, got {tuple(kernels.shape)}')
    if h < k or w < k:
        raise DimensionError(f'image {tuple(img.shape)} is smaller than kernel {k}x{k}')
    r = k // 2
    padded = F.pad(x, (r, r, r, r), mode='reflect')
    patches = F.unfold(padded, kernel_size=k).view(b, c, k * k, h * w)
    center = patches[:, :, (k * k) // 2:(k * k) // 2 + 1, :]
    taps = kernels.reshape(c, k * k).to(dtype=x.dtype, device=x.device)
    out = torch.einsum('bcnl,cn->bcl', patches - center, taps).reshape(b, c, h, w)
    return out.squeeze(0) if unbatched else out


def extract_srm(img, kernel_names=DEFAULT_SRM_KERNELS):
    """rich-model residuals, kernel ``kernel_names[c]`` applied to channel ``c``"""
    x, _ = _as_batch(img)
    if len(kernel_names) != x.shape[1]:
        raise DimensionError(
            f'need one SRM kernel per channel, got {len(kernel_names)} kernels for {x.shape[1]} channels'
        )
    kernels = torch.stack([SRM_KERNELS[name] for name in kernel_names])
    return _centered_correlate(img, kernels)


def extract_npr(img, factor=2):
    """upsampling residual: img minus the nearest-upsampled ``factor`` x ``factor`` block means"""
    x, unbatched = _as_batch(img)
    h, w = x.shape[-2:]
    if h % factor != 0 or w % factor != 0:
        raise DimensionError(f'image extents {h}x{w} are not divisible by NPR factor {factor}')
    down = F.avg_pool2d(x, kernel_size=factor)
    up = down.repeat_interleave(factor, dim=-2).repeat_interleave(factor, dim=-1)
    out = x - up
    return out.squeeze(0) if unbatched else out


def project_bayar(kernel):
    """re-impose the constrained-convolution constraint: center tap -1, remaining taps sum to 1"""
    kernel = kernel.detach().to(torch.float64).clone()
    k = kernel.shape[-1]
    if kernel.shape != (k, k) or k % 2 != 1:
        raise DimensionError(f'Bayar kernel must be odd and square, got {tuple(kernel.shape)}')
    c = k // 2
    kernel[c, c] = 0.
    total = kernel.sum()
    if total == 0:
        raise ContractError('cannot project a kernel whose off-center taps sum to zero')
    kernel = kernel / total
    kernel[c, c] = -1.
    return kernel


def check_bayar(kernel, tol=1e-6):
    """raise ContractError unless the center tap is -1 and the others sum to 1.
    ``tol`` is widened to the rounding error of the kernel dtype"""
    tol = max(tol, 64 * torch.finfo(kernel.dtype).eps)
    kernel = kernel.detach().to(torch.float64)
    k = kernel.shape[-1]
    c = k // 2
    center = kernel[c, c].item()
    off_center = kernel.sum().item() - center
    if abs(center + 1) > tol or abs(off_center - 1) > tol:
        raise ContractError(
            f'kernel violates the Bayar constraint: center={center}, sum of off-center taps={off_center}'
        )


def default_bayar_kernel(size=5):
    """constrained kernel projected from the separable fourth difference,
    which passes the period-2 band and suppresses smooth content"""
    if size != 5:
        return project_bayar(torch.ones(size, size, dtype=torch.float64))
    h = torch.tensor([1., -4., 6., -4., 1.], dtype=torch.float64)
    return project_bayar(-torch.outer(h, h))


def extract_bayar(img, kernel):
    """constrained-convolution residual, same kernel on every channel"""
    check_bayar(kernel)
    x, _ = _as_batch(img)
    kernels = kernel.expand(x.shape[1], *kernel.shape)
    return _centered_correlate(img, kernels)


def gaussian_kernel1d(sigma, radius=None):
    """normalized Gaussian taps on [-radius, radius]; default radius is ceil(3 sigma)"""
    if sigma <= 0:
        raise ContractError(f'sigma must be positive, but was {sigma}')
    if radius is None:
        radius = int(math.ceil(3 * sigma))
    x = torch.arange(-radius, radius + 1, dtype=torch.float64)
    taps = torch.exp(-x ** 2 / (2 * sigma ** 2))
    return taps / taps.sum()


def gaussian_kernel2d(sigma, radius=None):
    taps = gaussian_kernel1d(sigma, radius)
    return torch.outer(taps, taps)


def extract_hpr(img, sigma=1.0):
    """high-pass residual img - gaussian_blur(img, sigma), a stand-in for learned denoiser residuals"""
    x, _ = _as_batch(img)
    kernel = gaussian_kernel2d(sigma)
    kernels = kernel.expand(x.shape[1], *kernel.shape)
    # sum_i g_i (x_i - x_c) == blur(x) - x
    return -_centered_correlate(img, kernels)
