""" Pixel-wise reconstruction losses."""

# License: BSD 3 clause

import torch
import torch.nn.functional as F

from ellie.colorspace import rgb_to_grayscale
from ellie.errors import ShapeError


def check_pair(pred, gt):
    if pred.shape != gt.shape:
        raise ShapeError(f"""pred {tuple(pred.shape)} and gt {tuple(gt.shape)} must"""
                         f""" have the same shape.""")


def l1_loss(pred, gt):
    """Mean absolute difference."""
    check_pair(pred, gt)
    return (pred - gt).abs().mean()


def charbonnier_loss(pred, gt, eps=1e-3):
    """Mean of :code:`sqrt(d^2 + eps^2) - eps`; zero when pred equals gt."""
    check_pair(pred, gt)
    return (torch.sqrt((pred - gt) ** 2 + eps ** 2) - eps).mean()


def smooth_l1_loss(pred, gt, beta=1.0):
    """Huber-style loss: quadratic below :code:`beta`, linear above."""
    check_pair(pred, gt)
    return F.smooth_l1_loss(pred, gt, beta=beta)


def luma_loss(pred, gt):
    """L1 distance between grayscale versions of two RGB images."""
    check_pair(pred, gt)
    return (rgb_to_grayscale(pred) - rgb_to_grayscale(gt)).abs().mean()
