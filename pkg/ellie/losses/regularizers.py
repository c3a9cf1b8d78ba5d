""" Smoothness, color and exposure terms."""

# License: BSD 3 clause

import torch
import torch.nn.functional as F

from ellie.colorspace import rgb_to_grayscale
from ellie.colorspace._checks import check_channels
from ellie.errors import ConfigError
from ellie.losses.pixel import check_pair


def tv_loss(pred, weight_map=None):
    """Total variation: mean absolute horizontal and vertical first
    difference, each optionally weighted by :code:`weight_map` at the
    difference's first pixel.

    Parameters
    ----------
    pred: tensor
        Image of shape (B, C, H, W).
    weight_map: tensor, default: None
        Per-pixel weights broadcastable to :code:`pred`.
    """
    dx = (pred[..., :, 1:] - pred[..., :, :-1]).abs()
    dy = (pred[..., 1:, :] - pred[..., :-1, :]).abs()
    if weight_map is not None:
        weight_map = weight_map.expand_as(pred)
        dx = dx * weight_map[..., :, :-1]
        dy = dy * weight_map[..., :-1, :]
    count = dx.numel() + dy.numel()
    return (dx.sum() + dy.sum()) / max(count, 1)


def color_constancy_loss(pred, gt=None):
    """Sum over channel pairs of squared differences between channel means,
    averaged over the batch. :code:`gt` is ignored."""
    check_channels(pred, 3, 'pred')
    means = pred.mean(dim=(-2, -1))
    r, g, b = means[..., 0], means[..., 1], means[..., 2]
    return ((r - g) ** 2 + (r - b) ** 2 + (g - b) ** 2).mean()


def exposure_loss(pred, gt=None, target_level=0.6, patch=16):
    """Mean squared distance of non-overlapping patch-mean luma from
    :code:`target_level`. :code:`gt` is ignored."""
    check_channels(pred, 3, 'pred')
    if min(pred.shape[-2:]) < patch:
        raise ConfigError(f"""image is smaller than the {patch}-pixel exposure patch.""")
    level = F.avg_pool2d(rgb_to_grayscale(pred), patch)
    return ((level - target_level) ** 2).mean()


def _neighbour_differences(img):
    # differences to the left, right, upper and lower neighbour, zero padded
    padded = F.pad(img, (1, 1, 1, 1))
    centre = padded[..., 1:-1, 1:-1]
    return [centre - padded[..., 1:-1, :-2], centre - padded[..., 1:-1, 2:],
            centre - padded[..., :-2, 1:-1], centre - padded[..., 2:, 1:-1]]


def spatial_consistency_loss(pred, gt, pool=4):
    """Keep the local contrast structure of :code:`gt`: channel-mean maps
    are pooled over :code:`pool x pool` regions and the magnitude of
    differences to the four neighbours is matched."""
    check_pair(pred, gt)
    p = F.avg_pool2d(pred.mean(dim=1, keepdim=True), pool)
    g = F.avg_pool2d(gt.mean(dim=1, keepdim=True), pool)
    terms = [(dp.abs() - dg.abs()) ** 2
             for dp, dg in zip(_neighbour_differences(p), _neighbour_differences(g))]
    return torch.stack(terms).sum(dim=0).mean()
