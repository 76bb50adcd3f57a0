"""prepare data: generate the synthetic forgery corpus, extract low-level planes,
and build the torch datasets used for training and evaluation"""
import logging

import numpy as np
import torch

from .datasets import ForgeryDataset, SampleRecord, gen_split, read_dataset, write_dataset
from .errors import DataError
from .extractors import DEFAULT_SRM_KERNELS, ModalityExtractor
from .transforms import get_transforms
from .transforms.functional import Distortion

logger = logging.getLogger(__name__)

# images per batch when fitting standardization statistics
FIT_BATCH_SIZE = 256

# a generated test split never shares content seeds with the training split
TEST_SEED_OFFSET = 1


def gen_data(out,
             seed=0,
             n_real=1000,
             n_fake=1000,
             families=('UP',),
             image_size=32,
             distortion=None,
             n_jobs=1,
             **trace_kwargs):
    """generate a labelled split of the synthetic corpus and write it to ``out``

    Parameters
    ----------
    out : str, Path
        dataset file to write
    seed : int
    n_real : int
    n_fake : int
        fakes per family
    families : sequence
        of family names
    image_size : int
    distortion : DistortionConfig
        applied to every sample. Default is None.
    n_jobs : int

    Other Parameters
    ----------------
    cb_amplitude, hf_gain, hf_floor, hf_cutoff
        trace strengths, see ``forgerynets.datasets.forge``

    Returns
    -------
    samples : list
        of SampleRecord
    """
    samples = gen_split(seed, n_real, n_fake, families=families, image_size=image_size,
                        distortion=distortion, n_jobs=n_jobs, **trace_kwargs)
    write_dataset(out, samples)
    return samples


def extract(in_path, out, kinds, npr_factor=2, hpr_sigma=1.0, srm_kernels=DEFAULT_SRM_KERNELS):
    """read an RGB dataset file and write the raw planes of every kind in ``kinds``,
    stacked along the channel axis, C = 3 * len(kinds), in the same container format

    Planes are not standardized, statistics are fit by whoever trains on the file.
    """
    samples = read_dataset(in_path)
    extractor = ModalityExtractor(kinds, npr_factor=npr_factor, hpr_sigma=hpr_sigma, srm_kernels=srm_kernels)
    extracted = []
    for ind, sample in enumerate(samples):
        c, h, w = sample.image.shape
        if c != 3:
            raise DataError(f'sample {ind} of {in_path} has {c} channels, extract needs RGB images')
        planes = extractor.extract_raw(torch.from_numpy(sample.image))
        extracted.append(
            SampleRecord(label=sample.label,
                         family=sample.family,
                         image=planes.reshape(-1, h, w).numpy().astype(np.float32))
        )
    write_dataset(out, extracted)
    logger.info('extracted kinds %s from %d samples', [kind.value for kind in extractor.kinds], len(extracted))
    return extracted


def load_split(data_config, split, image_size=32, distortion=None):
    """samples of the training or test split: read from the configured file, or generated

    Parameters
    ----------
    data_config : forgerynets.config.DataConfig
    split : str
        one of {'train', 'test'}. A generated test split uses ``seed + 1``
        and the ``test_*`` options.
    image_size : int
        of generated samples
    distortion : str
        overrides ``data_config.distortion`` for generated samples. Default is None.

    Returns
    -------
    samples : list
        of SampleRecord
    """
    if split == 'train':
        path = data_config.train_path
        seed, n_real, n_fake, families = (data_config.seed, data_config.n_real,
                                          data_config.n_fake, data_config.families)
    elif split == 'test':
        path = data_config.test_path
        seed, n_real, n_fake, families = (data_config.seed + TEST_SEED_OFFSET, data_config.test_n_real,
                                          data_config.test_n_fake, data_config.test_families)
    else:
        raise ValueError(
            f"invalid split: {split}. Must be one of {{'train', 'test'}}"
        )

    if path is not None:
        logger.info('reading %s split from %s', split, path)
        samples = read_dataset(path)
        if not samples:
            raise DataError(f'dataset file is empty: {path}')
        return samples

    return gen_split(seed, n_real, n_fake,
                     families=families,
                     image_size=image_size,
                     distortion=data_config.distortion_config(distortion),
                     n_jobs=data_config.n_jobs,
                     **data_config.trace_kwargs())


def make_dataset(samples, split, data_config, align=2, augment=(), distortion=None):
    """wrap ``samples`` in a ForgeryDataset with the transforms of ``split``

    Parameters
    ----------
    samples : list
        of SampleRecord
    split : str
        one of {'train', 'test'}
    data_config : forgerynets.config.DataConfig
        crop size and distortion parameters
    align : int
        crop grid, the NPR factor of the model
    augment : sequence
        distortion kinds for distortion-augmented training
    distortion : str
        distortion applied on the fly to every test image. Default is None.
    """
    kinds = list(augment or ()) + ([distortion] if distortion is not None else [])
    if any(Distortion.from_str(kind) is not Distortion.NONE for kind in kinds):
        if samples and samples[0].image.shape[0] != 3:
            raise DataError('distortions apply to RGB images, not to extracted planes')
    transform, target_transform = get_transforms(split,
                                                 crop_size=data_config.crop_size,
                                                 align=align,
                                                 augment=augment,
                                                 distortion=distortion,
                                                 blur_sigma=data_config.blur_sigma,
                                                 down_ratio=data_config.down_ratio,
                                                 jpeg_quality=data_config.jpeg_quality)
    return ForgeryDataset(samples, transform=transform, target_transform=target_transform)


def fit_extractor(extractor, samples, batch_size=FIT_BATCH_SIZE):
    """fit standardization statistics of ``extractor`` on the images of a training split"""
    def batches():
        for start in range(0, len(samples), batch_size):
            yield torch.from_numpy(np.stack([sample.image for sample in samples[start:start + batch_size]]))

    return extractor.fit(batches())
