""" BT.601 full-range luma/chroma decomposition."""

# License: BSD 3 clause

import torch

from ellie.colorspace._checks import check_channels, channel
from ellie.colorspace.grayscale import LUMA_WEIGHTS, rgb_to_grayscale

# Full-range chroma scale factors: 2 * (1 - Kb) and 2 * (1 - Kr).
_CB_SCALE = 2.0 * (1.0 - LUMA_WEIGHTS[2])
_CR_SCALE = 2.0 * (1.0 - LUMA_WEIGHTS[0])


def rgb_to_yuv(img):
    """Split an RGB image into luma Y and zero-centred chroma U, V.

    Parameters
    ----------
    img: tensor
        Image of shape (..., 3, H, W) with values in [0, 1].

    Returns
    -------
    yuv: tensor
        Image of shape (..., 3, H, W); Y in [0, 1], U and V in [-0.5, 0.5].
        Gray pixels have U = V = 0.
    """
    check_channels(img, 3)
    y = rgb_to_grayscale(img)
    u = (channel(img, 2) - y) / _CB_SCALE
    v = (channel(img, 0) - y) / _CR_SCALE
    return torch.cat([y, u, v], dim=-3)


def yuv_to_rgb(img):
    """Inverse of :code:`rgb_to_yuv`."""
    check_channels(img, 3)
    y, u, v = channel(img, 0), channel(img, 1), channel(img, 2)
    r = y + _CR_SCALE * v
    b = y + _CB_SCALE * u
    g = (y - LUMA_WEIGHTS[0] * r - LUMA_WEIGHTS[2] * b) / LUMA_WEIGHTS[1]
    return torch.cat([r, g, b], dim=-3)
