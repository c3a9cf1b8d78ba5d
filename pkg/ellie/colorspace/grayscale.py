""" Luma extraction."""

# License: BSD 3 clause

from ellie.colorspace._checks import check_channels, channel

LUMA_WEIGHTS = (0.299, 0.587, 0.114)


def rgb_to_grayscale(img):
    """Convert an RGB image to its BT.601 luma.

    Parameters
    ----------
    img: tensor
        Image of shape (..., 3, H, W) with values in [0, 1].

    Returns
    -------
    luma: tensor
        Image of shape (..., 1, H, W),
        :math:`0.299R + 0.587G + 0.114B`.
    """
    check_channels(img, 3)
    wr, wg, wb = LUMA_WEIGHTS
    return wr * channel(img, 0) + wg * channel(img, 1) + wb * channel(img, 2)


def luminance_scalar(img):
    """Global mean luma of each image, the conditioning signal used by
    illumination-conditioned normalization.

    Returns
    -------
    level: tensor
        Shape (B,) for a batch, a 0-d tensor for a single image.
    """
    return rgb_to_grayscale(img).mean(dim=(-3, -2, -1)).clamp(0.0, 1.0)
