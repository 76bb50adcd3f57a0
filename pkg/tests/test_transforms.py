import unittest

import numpy as np
import torch

from forgerynets.core import make_generator
from forgerynets.errors import ConfigurationError, DimensionError
from forgerynets.transforms import (
    Distortion,
    DistortionConfig,
    apply_distortion,
    center_aligned_crop,
    downsample_restore,
    gaussian_blur,
    get_transforms,
    jpeg_quant_table,
    jpeg_surrogate,
    random_aligned_crop,
)


def rand_image(seed, size=16):
    return torch.rand(3, size, size, generator=make_generator(seed), dtype=torch.float64)


def index_image(size=16):
    """pixel (i, j) holds i * 100 + j + 1, so a crop reveals where it was taken"""
    i, j = np.meshgrid(np.arange(size), np.arange(size), indexing='ij')
    return torch.from_numpy(i * 100. + j + 1.).expand(3, size, size).clone()


class TestDistortion(unittest.TestCase):
    def test_from_str(self):
        self.assertIs(Distortion.from_str('downsample'), Distortion.DOWNSAMPLE)
        self.assertIs(Distortion.from_str(' JPEG '), Distortion.JPEGQ)
        with self.assertRaises(ConfigurationError):
            Distortion.from_str('rotate')

    def test_config_validation(self):
        with self.assertRaises(ConfigurationError):
            DistortionConfig(kind='down', down_ratio=1.5)
        with self.assertRaises(ConfigurationError):
            DistortionConfig(kind='jpeg', jpeg_quality=0)
        with self.assertRaises(ConfigurationError):
            DistortionConfig(kind='blur', blur_sigma=0.)

    def test_none_is_identity(self):
        img = rand_image(0)
        self.assertIs(apply_distortion(img, DistortionConfig()), img)

    def test_blur_keeps_constant(self):
        img = torch.full((3, 16, 16), 0.3, dtype=torch.float64)
        self.assertTrue(torch.allclose(gaussian_blur(img, 1.5), img))

    def test_blur_smooths(self):
        img = rand_image(1)
        self.assertLess(gaussian_blur(img).var().item(), img.var().item())

    def test_downsample_keeps_constant_and_shape(self):
        img = torch.full((2, 3, 16, 16), 0.7, dtype=torch.float64)
        out = downsample_restore(img, 0.5)
        self.assertEqual(out.shape, img.shape)
        self.assertTrue(torch.allclose(out, img))

    def test_jpeg_quant_table(self):
        self.assertTrue(np.array_equal(jpeg_quant_table(100), np.ones((8, 8))))
        self.assertEqual(jpeg_quant_table(50)[0, 0], 16.)
        with self.assertRaises(ConfigurationError):
            jpeg_quant_table(101)

    def test_jpeg_high_quality_is_close(self):
        img = rand_image(2)
        out = jpeg_surrogate(img, quality=100)
        self.assertEqual(out.shape, img.shape)
        self.assertEqual(out.dtype, img.dtype)
        self.assertLess((out - img).abs().mean().item(), 1. / 255)

    def test_jpeg_lower_quality_loses_more(self):
        img = rand_image(3)
        err_high = (jpeg_surrogate(img, 95) - img).abs().mean().item()
        err_low = (jpeg_surrogate(img, 10) - img).abs().mean().item()
        self.assertLess(err_high, err_low)

    def test_jpeg_pads_partial_blocks(self):
        img = rand_image(4, size=12)
        self.assertEqual(jpeg_surrogate(img, 75).shape, img.shape)

    def test_distortions_clamp_to_unit_range(self):
        img = rand_image(5)
        for kind in ('blur', 'down', 'jpeg'):
            out = apply_distortion(img, DistortionConfig(kind=kind, jpeg_quality=10))
            self.assertGreaterEqual(out.min().item(), 0., msg=kind)
            self.assertLessEqual(out.max().item(), 1., msg=kind)


class TestAlignedCrop(unittest.TestCase):
    def test_center_crop(self):
        img = index_image()
        out = center_aligned_crop(img, 12, align=2)
        self.assertEqual(out.shape, img.shape)
        self.assertTrue(torch.equal(out[:, 2:14, 2:14], img[:, 2:14, 2:14]))
        self.assertEqual(out[:, :2].abs().sum().item(), 0.)
        self.assertEqual(out[:, :, 14:].abs().sum().item(), 0.)

    def test_random_crop_offsets_are_aligned(self):
        img = index_image()
        torch.manual_seed(0)
        for _ in range(20):
            out = random_aligned_crop(img, 12, align=2)
            value = int(out[0, 2, 2].item()) - 1
            top, left = value // 100, value % 100
            self.assertEqual(top % 2, 0)
            self.assertEqual(left % 2, 0)
            self.assertTrue(torch.equal(out[:, 2:14, 2:14], img[:, top:top + 12, left:left + 12]))

    def test_misaligned_padding_raises(self):
        with self.assertRaises(DimensionError):
            center_aligned_crop(index_image(), 13, align=2)

    def test_crop_larger_than_image_raises(self):
        with self.assertRaises(DimensionError):
            random_aligned_crop(index_image(), 20)

    def test_full_size_crop_is_identity(self):
        img = index_image()
        self.assertTrue(torch.equal(center_aligned_crop(img, 16), img))


class TestGetTransforms(unittest.TestCase):
    def test_test_split(self):
        transform, target_transform = get_transforms('test', crop_size=16, distortion='blur')
        arr = np.random.default_rng(0).random((3, 16, 16)).astype(np.float32)
        out = transform(arr)
        self.assertIsInstance(out, torch.Tensor)
        self.assertEqual(tuple(out.shape), (3, 16, 16))
        self.assertFalse(torch.equal(out, torch.from_numpy(arr)))
        target = target_transform(np.float32(1))
        self.assertEqual(target.dtype, torch.float32)
        self.assertEqual(target.item(), 1.)

    def test_train_split(self):
        transform, _ = get_transforms('train', crop_size=12, augment=('jpeg', 'blur'))
        arr = np.random.default_rng(1).random((3, 16, 16)).astype(np.float32)
        self.assertEqual(tuple(transform(arr).shape), (3, 16, 16))

    def test_invalid_split(self):
        with self.assertRaises(ValueError):
            get_transforms('val', crop_size=16)


if __name__ == '__main__':
    unittest.main()
