"""synthetic forgery corpus whose low-level cues are known by construction

Real images are band-limited Gaussian random fields. Each forgery family
starts from the same kind of content and adds one low-level trace:

    UP  2x average-downsample then nearest-upsample (blockiness, a null NPR residual)
    HF  top frequency band replaced by louder noise (visible to SRM residuals)
    CB  fixed-phase period-2 checkerboard (visible to constrained convolution)

Every sample draws from its own generator seeded with (seed, index, stream),
so corpora are pure functions of the seed and can be generated in parallel.
"""
import logging

from joblib import Parallel, delayed
import numpy as np
import scipy.ndimage
import torch

from ..errors import ConfigurationError
from ..transforms.functional import DistortionConfig, Distortion, apply_distortion
from .records import FAKE, FAKE_FAMILIES, REAL, Family, SampleRecord

logger = logging.getLogger(__name__)

CONTENT_STREAM = 0
FORGERY_STREAM = 1
SPLIT_STREAM = 2

SIGMA_RANGE = (0.5, 2.0)
CB_AMPLITUDE = 0.02
HF_GAIN = 2.0
HF_FLOOR = 0.01
# Chebyshev frequency radius in cycles/pixel above which HF replaces content, 3/4 of Nyquist
HF_CUTOFF = 0.375


def _rng(seed, index, stream):
    return np.random.default_rng([seed, index, stream])


def real_content(seed, index, image_size=32, sigma_range=SIGMA_RANGE):
    """one band-limited Gaussian random field, (3, H, W) float64 rescaled to [0, 1]"""
    rng = _rng(seed, index, CONTENT_STREAM)
    noise = rng.standard_normal((3, image_size, image_size))
    sigmas = rng.uniform(*sigma_range, size=3)
    img = np.stack([
        scipy.ndimage.gaussian_filter(channel, sigma=sigma, mode='wrap')
        for channel, sigma in zip(noise, sigmas)
    ])
    lo, hi = img.min(), img.max()
    return (img - lo) / (hi - lo)


def high_band_mask(shape, cutoff=HF_CUTOFF):
    h, w = shape
    fy = np.abs(np.fft.fftfreq(h))[:, None]
    fx = np.abs(np.fft.fftfreq(w))[None, :]
    return np.maximum(fy, fx) > cutoff


def _band(channel, mask):
    return np.fft.ifft2(np.fft.fft2(channel) * mask).real


def _rms(x):
    return float(np.sqrt(np.mean(x ** 2)))


def upsample_trace(img, factor=2):
    """average-downsample by ``factor`` then nearest-upsample back"""
    c, h, w = img.shape
    blocks = img.reshape(c, h // factor, factor, w // factor, factor).mean(axis=(2, 4))
    return blocks.repeat(factor, axis=1).repeat(factor, axis=2)


def high_frequency_trace(img, rng, gain=HF_GAIN, floor=HF_FLOOR, cutoff=HF_CUTOFF):
    """replace the top frequency band of each channel with band-limited noise
    whose RMS is ``gain`` x max(band RMS of the source, ``floor``)"""
    mask = high_band_mask(img.shape[-2:], cutoff)
    out = np.empty_like(img)
    for ind, channel in enumerate(img):
        band = _band(channel, mask)
        target_rms = gain * max(_rms(band), floor)
        noise = _band(rng.standard_normal(channel.shape), mask)
        out[ind] = channel - band + noise * (target_rms / _rms(noise))
    return out


def checkerboard_trace(img, amplitude=CB_AMPLITUDE):
    h, w = img.shape[-2:]
    rows, cols = np.indices((h, w))
    pattern = np.where((rows + cols) % 2 == 0, 1., -1.)
    return img + amplitude * pattern


def forge(img, family, rng, cb_amplitude=CB_AMPLITUDE, hf_gain=HF_GAIN, hf_floor=HF_FLOOR, hf_cutoff=HF_CUTOFF):
    """add the trace of ``family`` to a real image and clamp to [0, 1]"""
    family = Family.from_str(family)
    if family is Family.UP:
        out = upsample_trace(img)
    elif family is Family.HF:
        out = high_frequency_trace(img, rng, hf_gain, hf_floor, hf_cutoff)
    elif family is Family.CB:
        out = checkerboard_trace(img, cb_amplitude)
    else:
        raise ConfigurationError(f'unknown forgery family: {family.name}. Must be one of {[f.name for f in FAKE_FAMILIES]}')
    return np.clip(out, 0., 1.)


def _distort(img, distortion):
    if distortion is None or distortion.kind is Distortion.NONE:
        return img
    return apply_distortion(torch.from_numpy(img), distortion).numpy()


def _make_real(seed, index, image_size, sigma_range, distortion):
    img = real_content(seed, index, image_size, sigma_range)
    img = _distort(img, distortion)
    return SampleRecord(label=REAL, family=Family.NONE, image=img.astype(np.float32))


def _make_fake(seed, index, family, image_size, sigma_range, distortion, trace_kwargs):
    img = real_content(seed, index, image_size, sigma_range)
    img = forge(img, family, _rng(seed, index, FORGERY_STREAM), **trace_kwargs)
    img = _distort(img, distortion)
    return SampleRecord(label=FAKE, family=family, image=img.astype(np.float32))


def gen_real(seed, n, image_size=32, sigma_range=SIGMA_RANGE, start=0, distortion=None, n_jobs=1):
    """``n`` real samples with content indices ``start`` .. ``start + n - 1``"""
    if n < 1:
        raise ConfigurationError(f'n must be at least 1, but was {n}')
    return Parallel(n_jobs=n_jobs)(
        delayed(_make_real)(seed, index, image_size, sigma_range, distortion)
        for index in range(start, start + n)
    )


def gen_fake(seed, n, family, image_size=32, sigma_range=SIGMA_RANGE, start=0, distortion=None, n_jobs=1,
             **trace_kwargs):
    """``n`` fakes of ``family``. Sample i forges the same content as ``gen_real(seed, n, start=start)[i]``.

    Other Parameters
    ----------------
    cb_amplitude, hf_gain, hf_floor, hf_cutoff
        trace strengths, see ``forge``
    """
    if n < 1:
        raise ConfigurationError(f'n must be at least 1, but was {n}')
    family = Family.from_str(family)
    if family not in FAKE_FAMILIES:
        raise ConfigurationError(f'unknown forgery family: {family.name}. Must be one of {[f.name for f in FAKE_FAMILIES]}')
    return Parallel(n_jobs=n_jobs)(
        delayed(_make_fake)(seed, index, family, image_size, sigma_range, distortion, trace_kwargs)
        for index in range(start, start + n)
    )


def gen_split(seed, n_real, n_fake, families=(Family.UP,), image_size=32, distortion=None,
              sigma_range=SIGMA_RANGE, n_jobs=1, **trace_kwargs):
    """compose a labelled split: ``n_real`` reals plus ``n_fake`` fakes per family,
    every sample from distinct content, shuffled with a generator derived from ``seed``

    Parameters
    ----------
    seed : int
    n_real : int
    n_fake : int
        number of fakes per family
    families : sequence
        of Family or family names
    image_size : int
    distortion : DistortionConfig
        applied to every sample after forging. Default is None.
    n_jobs : int
        joblib workers. Output does not depend on it.

    Returns
    -------
    samples : list
        of SampleRecord
    """
    families = [Family.from_str(family) for family in families]
    if distortion is not None and not isinstance(distortion, DistortionConfig):
        distortion = DistortionConfig(kind=distortion)
    samples = []
    if n_real > 0:
        samples.extend(gen_real(seed, n_real, image_size, sigma_range, start=0, distortion=distortion, n_jobs=n_jobs))
    start = n_real
    for family in families:
        if n_fake > 0:
            samples.extend(gen_fake(seed, n_fake, family, image_size, sigma_range, start=start,
                                    distortion=distortion, n_jobs=n_jobs, **trace_kwargs))
        start += n_fake
    if not samples:
        raise ConfigurationError('split would be empty: n_real and n_fake are both zero')

    order = np.random.default_rng([seed, SPLIT_STREAM]).permutation(len(samples))
    logger.info('generated %d real and %d fake samples of families %s with seed %d',
                n_real, n_fake * len(families), [family.name for family in families], seed)
    return [samples[ind] for ind in order]
