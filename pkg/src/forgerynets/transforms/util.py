import torchvision.transforms as vis_transforms

from . import functional as F
from . import transforms


def get_transforms(split,
                   crop_size,
                   align=2,
                   augment=(),
                   distortion=None,
                   blur_sigma=1.0,
                   down_ratio=0.5,
                   jpeg_quality=95):
    """helper function that returns transforms and target transforms used
    with ``forgerynets.datasets.ForgeryDataset``, given the split.

    Parameters
    ----------
    split : str
        one of {'train', 'test'}.
        'train' applies the random distortion augmentation (if any) and a random grid-aligned crop.
        'test' applies ``distortion`` (if any) and a center grid-aligned crop.
    crop_size : int
        side of the square crop. Use the image size to disable cropping.
    align : int
        crop offsets are multiples of ``align``. Default is 2, the default NPR factor.
    augment : sequence
        of distortion kinds used for distortion-augmented training. Default is empty.
    distortion : str, Distortion
        distortion applied to every image of a test split. Default is None.
    blur_sigma, down_ratio, jpeg_quality
        parameters shared by every distortion config built here.

    Returns
    -------
    transform, target_transform
    """
    def make_cfg(kind):
        return F.DistortionConfig(kind=kind,
                                  blur_sigma=blur_sigma,
                                  down_ratio=down_ratio,
                                  jpeg_quality=jpeg_quality)

    if split == 'train':
        transform_list = [transforms.TensorFromArray()]
        if augment:
            transform_list.append(
                transforms.RandomDistortion([make_cfg(kind) for kind in augment])
            )
        transform_list.append(transforms.RandomAlignedCrop(crop_size, align))
    elif split == 'test':
        transform_list = [transforms.TensorFromArray()]
        if distortion is not None and F.Distortion.from_str(distortion) is not F.Distortion.NONE:
            transform_list.append(transforms.Distort(make_cfg(distortion)))
        transform_list.append(transforms.CenterAlignedCrop(crop_size, align))
    else:
        raise ValueError(
            f"invalid split: {split}. Must be one of {{'train', 'test'}}"
        )

    transform = vis_transforms.Compose(transform_list)
    target_transform = transforms.TensorFromNumpyScalar()
    return transform, target_transform
