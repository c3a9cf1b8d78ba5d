""" sRGB <-> CIELAB (D65) conversion."""

# License: BSD 3 clause

import numpy as np
import torch

from ellie.colorspace._checks import check_channels, channel

_RGB_TO_XYZ = np.array([[0.4124564, 0.3575761, 0.1804375],
                        [0.2126729, 0.7151522, 0.0721750],
                        [0.0193339, 0.1191920, 0.9503041]])
_XYZ_TO_RGB = np.linalg.inv(_RGB_TO_XYZ)
# D65 reference white, so that RGB white maps exactly onto it.
_WHITE = _RGB_TO_XYZ.sum(axis=1)

_DELTA = 6.0 / 29.0


def _apply_matrix(matrix, img):
    m = torch.as_tensor(matrix, dtype=img.dtype, device=img.device)
    return torch.einsum('ij,...jhw->...ihw', m, img)


def _srgb_to_linear(c):
    curved = ((c.clamp(min=0.04045) + 0.055) / 1.055).pow(2.4)
    return torch.where(c <= 0.04045, c / 12.92, curved)


def _linear_to_srgb(c):
    curved = 1.055 * c.clamp(min=0.0031308).pow(1.0 / 2.4) - 0.055
    return torch.where(c <= 0.0031308, 12.92 * c, curved)


def _lab_f(t):
    cube_root = t.clamp(min=_DELTA ** 3).pow(1.0 / 3.0)
    return torch.where(t > _DELTA ** 3, cube_root, t / (3 * _DELTA ** 2) + 4.0 / 29.0)


def _lab_f_inv(f):
    return torch.where(f > _DELTA, f ** 3, 3 * _DELTA ** 2 * (f - 4.0 / 29.0))


def rgb_to_lab(img):
    """Convert gamma-encoded sRGB to CIELAB under the D65 white point.

    Parameters
    ----------
    img: tensor
        Image of shape (..., 3, H, W) with values in [0, 1].

    Returns
    -------
    lab: tensor
        L in [0, 100], a and b roughly in [-128, 127].
    """
    check_channels(img, 3)
    xyz = _apply_matrix(_RGB_TO_XYZ, _srgb_to_linear(img))
    white = torch.as_tensor(_WHITE, dtype=img.dtype, device=img.device).view(3, 1, 1)
    f = _lab_f(xyz / white)
    fx, fy, fz = channel(f, 0), channel(f, 1), channel(f, 2)
    return torch.cat([116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)], dim=-3)


def lab_to_rgb(img):
    """Inverse of :code:`rgb_to_lab`. Output is not clipped."""
    check_channels(img, 3)
    fy = (channel(img, 0) + 16.0) / 116.0
    fx = fy + channel(img, 1) / 500.0
    fz = fy - channel(img, 2) / 200.0
    white = torch.as_tensor(_WHITE, dtype=img.dtype, device=img.device).view(3, 1, 1)
    xyz = _lab_f_inv(torch.cat([fx, fy, fz], dim=-3)) * white
    return _linear_to_srgb(_apply_matrix(_XYZ_TO_RGB, xyz))
