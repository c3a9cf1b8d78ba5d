""" Horizontal/Vertical-Intensity color space with a learnable intensity
collapse.

The chroma plane is the HSV hue/saturation pair written in Cartesian form,
so hues on either side of red land next to each other, and its radius is
scaled by a collapsed intensity that shrinks chroma in dark regions:

.. math::

    I = \\max(R, G, B), \\quad c_k(I) = \\sin(\\pi I / 2)^{1/k}

    (h, v) = c_k(I) \\cdot S \\cdot (\\cos 2\\pi H, \\sin 2\\pi H)
"""

# License: BSD 3 clause

import math
from typing import NamedTuple

import torch
from torch import nn

from ellie.colorspace._checks import check_channels, check_positive, channel
from ellie.errors import ShapeError


class HviImage(NamedTuple):
    """Image in HVI coordinates.

    Attributes
    ----------
    hv: tensor
        Polarized hue-saturation plane, shape (..., 2, H, W).
    intensity: tensor
        Intensity map in [0, 1], shape (..., 1, H, W).
    k: float or tensor
        Collapse strength used for the forward transform.
    """
    hv: torch.Tensor
    intensity: torch.Tensor
    k: object


def intensity_collapse(intensity, k):
    """Monotone, endpoint-fixed remapping :math:`\\sin(\\pi I / 2)^{1/k}`.

    Larger k compresses the dark end more strongly.

    Parameters
    ----------
    intensity: tensor
        Map with values in [0, 1].
    k: float or tensor
        Collapse strength. Must be greater than 0.

    Returns
    -------
    collapsed: tensor
        Map with values in [0, 1]; 0 maps to 0 and 1 maps to 1.
    """
    check_positive(k, 'k')
    s = torch.sin(intensity.clamp(0.0, 1.0) * (math.pi / 2.0))
    positive = s > 0
    # exp(log(s) / k) keeps d/dk finite at black pixels
    safe = torch.where(positive, s, torch.ones_like(s))
    return torch.where(positive, torch.exp(torch.log(safe) / k), torch.zeros_like(s))


def rgb_to_hvi(img, k=1.0):
    """Convert an RGB image to HVI coordinates.

    Parameters
    ----------
    img: tensor
        Image of shape (..., 3, H, W) with values in [0, 1].
    k: float or tensor, default: 1.0
        Collapse strength. Must be greater than 0.

    Returns
    -------
    hvi: HviImage
        Achromatic pixels map to hv = (0, 0).
    """
    check_channels(img, 3)
    check_positive(k, 'k')
    r, g, b = channel(img, 0), channel(img, 1), channel(img, 2)
    value = img.max(dim=-3, keepdim=True)[0]
    delta = value - img.min(dim=-3, keepdim=True)[0]

    chromatic = delta > 0
    safe_delta = torch.where(chromatic, delta, torch.ones_like(delta))
    hue6 = torch.where(value == r, torch.remainder((g - b) / safe_delta, 6.0),
                       torch.where(value == g, (b - r) / safe_delta + 2.0,
                                   (r - g) / safe_delta + 4.0))
    hue = torch.where(chromatic, hue6, torch.zeros_like(hue6)) / 6.0

    lit = value > 0
    safe_value = torch.where(lit, value, torch.ones_like(value))
    saturation = torch.where(lit, delta / safe_value, torch.zeros_like(value))

    radius = intensity_collapse(value, k) * saturation
    angle = 2.0 * math.pi * hue
    hv = torch.cat([radius * torch.cos(angle), radius * torch.sin(angle)], dim=-3)
    return HviImage(hv=hv, intensity=value, k=k)


def hvi_to_rgb(hvi):
    """Invert :code:`rgb_to_hvi` using the collapse strength stored in
    :code:`hvi`.

    The chroma radius is clipped to the collapsed-intensity disc, so planes
    edited by a network still decode to valid RGB.
    """
    hv, intensity, k = hvi
    check_channels(hv, 2, 'hv')
    check_channels(intensity, 1, 'intensity')
    if hv.shape[-2:] != intensity.shape[-2:]:
        raise ShapeError("""hv and intensity must share spatial dimensions.""")
    check_positive(k, 'k')

    value = intensity.clamp(0.0, 1.0)
    collapsed = intensity_collapse(value, k)
    h, v = channel(hv, 0), channel(hv, 1)

    rad2 = h * h + v * v
    nonzero = rad2 > 0
    radius = torch.where(nonzero, torch.sqrt(torch.where(nonzero, rad2, torch.ones_like(rad2))),
                         torch.zeros_like(rad2))
    lit = collapsed > 0
    safe_collapsed = torch.where(lit, collapsed, torch.ones_like(collapsed))
    saturation = torch.where(lit, radius / safe_collapsed, torch.zeros_like(radius)).clamp(0.0, 1.0)

    safe_h = torch.where(nonzero, h, torch.ones_like(h))
    safe_v = torch.where(nonzero, v, torch.zeros_like(v))
    hue = torch.remainder(torch.atan2(safe_v, safe_h) / (2.0 * math.pi), 1.0)

    def component(n):
        kk = torch.remainder(n + 6.0 * hue, 6.0)
        ramp = torch.minimum(kk, 4.0 - kk).clamp(0.0, 1.0)
        return value - value * saturation * ramp

    return torch.cat([component(5.0), component(3.0), component(1.0)], dim=-3)


class HviTransform(nn.Module):
    """HVI transform with a learnable collapse strength.

    k is stored as :code:`log_k` so it stays positive during training and
    travels with the module's state dict into checkpoints.

    Parameters
    ----------
    k: float, default: 1.0
        Initial collapse strength. Must be greater than 0.
    """

    def __init__(self, k=1.0):
        super().__init__()
        check_positive(k, 'k')
        self.log_k = nn.Parameter(torch.tensor(math.log(k)))

    @property
    def k(self):
        return torch.exp(self.log_k)

    def forward(self, img):
        return rgb_to_hvi(img, self.k)

    def inverse(self, hvi):
        return hvi_to_rgb(HviImage(hvi.hv, hvi.intensity, self.k))
