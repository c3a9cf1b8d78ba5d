""" Unit tests for colorspace"""

# License: BSD 3 clause

import math
import unittest

import torch

from ellie import (rgb_to_grayscale, luminance_scalar, rgb_to_yuv, yuv_to_rgb, rgb_to_lab,
                   lab_to_rgb, intensity_collapse, rgb_to_hvi, hvi_to_rgb, HviImage,
                   HviTransform, make_virtual_exposures, ShapeError, DomainError)


def pixel(r, g, b, dtype=torch.float64):
    return torch.tensor([r, g, b], dtype=dtype).view(3, 1, 1)


def random_image(seed=0, shape=(2, 3, 16, 16), dtype=torch.float64, low=0.0):
    generator = torch.Generator().manual_seed(seed)
    return low + (1 - low) * torch.rand(shape, generator=generator, dtype=dtype)


class TestGrayscale(unittest.TestCase):
    """Tests for luma extraction."""

    @staticmethod
    def test_white_black_red():
        """Test luma of white, black and pure red pixels"""
        assert math.isclose(float(rgb_to_grayscale(pixel(1, 1, 1))), 1.0, abs_tol=1e-12)
        assert float(rgb_to_grayscale(pixel(0, 0, 0))) == 0.0
        assert math.isclose(float(rgb_to_grayscale(pixel(1, 0, 0))), 0.299, abs_tol=1e-12)

    @staticmethod
    def test_luminance_scalar_per_image():
        """Test global luma is one value per image"""
        img = torch.stack([torch.full((3, 4, 4), 0.2), torch.full((3, 4, 4), 0.8)])
        level = luminance_scalar(img)
        assert level.shape == (2,)
        assert torch.allclose(level, torch.tensor([0.2, 0.8]), atol=1e-6)

    def test_wrong_channels(self):
        """Test a 4-channel image is rejected"""
        with self.assertRaises(ShapeError):
            rgb_to_grayscale(torch.rand(4, 8, 8))


class TestYuvLab(unittest.TestCase):
    """Tests for YUV and Lab conversions."""

    @staticmethod
    def test_yuv_gray_has_no_chroma():
        """Test gray pixels map to Y = c and U = V = 0"""
        yuv = rgb_to_yuv(pixel(0.4, 0.4, 0.4))
        assert torch.allclose(yuv.flatten(), torch.tensor([0.4, 0.0, 0.0], dtype=torch.float64),
                              atol=1e-12)

    @staticmethod
    def test_yuv_round_trip():
        """Test YUV round trip error is below 1e-5 in single precision"""
        img = random_image(1, dtype=torch.float32)
        assert (yuv_to_rgb(rgb_to_yuv(img)) - img).abs().max() < 1e-5

    @staticmethod
    def test_lab_white_and_black():
        """Test white maps to L = 100, a = b = 0 and black to L = 0"""
        white = rgb_to_lab(pixel(1, 1, 1)).flatten()
        assert abs(float(white[0]) - 100.0) < 1e-6
        assert abs(float(white[1])) < 1e-4 and abs(float(white[2])) < 1e-4
        assert abs(float(rgb_to_lab(pixel(0, 0, 0)).flatten()[0])) < 1e-9

    @staticmethod
    def test_lab_round_trip():
        """Test Lab round trip error is below 1e-3 on [0.01, 1] inputs"""
        img = random_image(2, dtype=torch.float32, low=0.01)
        assert (lab_to_rgb(rgb_to_lab(img)) - img).abs().max() < 1e-3


class TestHvi(unittest.TestCase):
    """Tests for the HVI color space."""

    @staticmethod
    def test_collapse_endpoints():
        """Test collapse fixes 0 and 1 for every k"""
        ends = torch.tensor([0.0, 1.0], dtype=torch.float64)
        for k in (0.25, 0.5, 1.0, 2.0, 4.0):
            out = intensity_collapse(ends, k)
            assert float(out[0]) == 0.0 and abs(float(out[1]) - 1.0) < 1e-12

    @staticmethod
    def test_collapse_half():
        """Test collapse of 0.5 at k = 1 is sin(pi / 4)"""
        out = intensity_collapse(torch.tensor(0.5, dtype=torch.float64), 1.0)
        assert abs(float(out) - math.sqrt(0.5)) < 1e-12

    @staticmethod
    def test_collapse_monotone():
        """Test collapse is non-decreasing on random pairs"""
        generator = torch.Generator().manual_seed(3)
        a, b = torch.rand(2, 1000, generator=generator, dtype=torch.float64)
        lo, hi = torch.minimum(a, b), torch.maximum(a, b)
        for k in (0.25, 0.5, 1.0, 2.0, 4.0):
            assert bool((intensity_collapse(hi, k) >= intensity_collapse(lo, k)).all())

    @staticmethod
    def test_collapse_stronger_with_k():
        """Test larger k gives smaller values in the dark range"""
        dark = torch.tensor([0.05, 0.1, 0.2], dtype=torch.float64)
        assert bool((intensity_collapse(dark, 2.0) < intensity_collapse(dark, 1.0)).all())

    def test_collapse_bad_k(self):
        """Test non-positive k is a domain error"""
        with self.assertRaises(DomainError):
            intensity_collapse(torch.rand(4), 0.0)
        with self.assertRaises(DomainError):
            rgb_to_hvi(torch.rand(3, 4, 4), -1.0)

    @staticmethod
    def test_achromatic_pixel():
        """Test gray pixels map to hv = (0, 0) with intensity c"""
        hvi = rgb_to_hvi(pixel(0.3, 0.3, 0.3))
        assert float(hvi.hv.abs().max()) == 0.0
        assert float(hvi.intensity) == 0.3

    @staticmethod
    def test_primary_colors():
        """Test red lies on the positive h axis and green at 120 degrees"""
        red = rgb_to_hvi(pixel(1, 0, 0)).hv.flatten()
        green = rgb_to_hvi(pixel(0, 1, 0)).hv.flatten()
        assert torch.allclose(red, torch.tensor([1.0, 0.0], dtype=torch.float64), atol=1e-12)
        assert torch.allclose(green, torch.tensor([-0.5, math.sqrt(3) / 2], dtype=torch.float64),
                              atol=1e-12)

    @staticmethod
    def test_intensity_is_channel_max():
        """Test the intensity channel equals the per-pixel RGB max exactly"""
        img = random_image(4)
        assert torch.equal(rgb_to_hvi(img).intensity, img.max(dim=-3, keepdim=True)[0])

    @staticmethod
    def test_round_trip():
        """Test HVI round trip error is below 1e-5 for k in {0.5, 1, 2}"""
        img = random_image(5)
        for k in (0.5, 1.0, 2.0):
            assert (hvi_to_rgb(rgb_to_hvi(img, k)) - img).abs().max() < 1e-5

    @staticmethod
    def test_radius_bounded_by_collapsed_intensity():
        """Test the hv radius never exceeds the collapsed intensity"""
        hvi = rgb_to_hvi(random_image(6), 2.0)
        radius = hvi.hv.pow(2).sum(dim=-3, keepdim=True).sqrt()
        assert bool((radius <= intensity_collapse(hvi.intensity, 2.0) + 1e-12).all())

    @staticmethod
    def test_red_boundary_continuity():
        """Test hues on either side of red map to nearby hv points"""
        steps = torch.linspace(-0.05, 0.05, 11, dtype=torch.float64)
        colors = [pixel(1.0, float(t), 0.0) if t >= 0 else pixel(1.0, 0.0, float(-t))
                  for t in steps]
        hv = torch.stack([rgb_to_hvi(c).hv.flatten() for c in colors])
        jumps = (hv[1:] - hv[:-1]).norm(dim=1)
        assert float(jumps.max()) < 0.02

    @staticmethod
    def test_decode_clips_oversized_chroma():
        """Test decoding an edited plane beyond the chroma disc stays in [0, 1]"""
        hv = torch.full((1, 2, 4, 4), 3.0)
        out = hvi_to_rgb(HviImage(hv, torch.full((1, 1, 4, 4), 0.5), 1.0))
        assert float(out.min()) >= 0.0 and float(out.max()) <= 0.5 + 1e-6

    @staticmethod
    def test_transform_learns_k():
        """Test the learnable transform exposes a positive k with a gradient"""
        transform = HviTransform(2.0)
        assert abs(float(transform.k) - 2.0) < 1e-6
        img = random_image(7, dtype=torch.float32)
        transform(img).hv.abs().sum().backward()
        assert transform.log_k.grad is not None and torch.isfinite(transform.log_k.grad)
        out = transform.inverse(transform(img))
        assert (out - img).abs().max() < 1e-4


class TestExposures(unittest.TestCase):
    """Tests for virtual exposures."""

    @staticmethod
    def test_gammas():
        """Test under, normal and over exposures"""
        img = torch.full((3, 2, 2), 0.25)
        under, normal, over = make_virtual_exposures(img)
        assert torch.equal(normal, img)
        assert torch.allclose(over, torch.full((3, 2, 2), 0.5))
        assert torch.allclose(under, torch.full((3, 2, 2), 0.0625))

    @staticmethod
    def test_endpoints_fixed():
        """Test 0 and 1 are unchanged by every gamma"""
        img = torch.tensor([0.0, 1.0]).view(1, 1, 2).expand(3, 1, 2)
        for exposure in make_virtual_exposures(img, (3.0, 0.2)):
            assert torch.equal(exposure, img)

    def test_bad_gamma(self):
        """Test non-positive gamma is a domain error"""
        with self.assertRaises(DomainError):
            make_virtual_exposures(torch.rand(3, 2, 2), (1.0, 0.0))


if __name__ == '__main__':
    unittest.main()
