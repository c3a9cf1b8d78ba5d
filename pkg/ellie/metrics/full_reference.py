""" Full-reference quality metrics."""

# License: BSD 3 clause

import math

import numpy as np
import torch

from ellie.errors import ShapeError
from ellie.losses.structural import ssim_index, ms_ssim


def _as_batch(img):
    t = torch.as_tensor(np.asarray(img)) if not torch.is_tensor(img) else img
    t = t.detach().to(torch.float64)
    if t.dim() == 3:
        t = t.unsqueeze(0)
    if t.dim() != 4:
        raise ShapeError(f"""expected a (C, H, W) or (B, C, H, W) image, got {tuple(t.shape)}.""")
    return t


def _pair(pred, gt):
    p, g = _as_batch(pred), _as_batch(gt)
    if p.shape != g.shape:
        raise ShapeError(f"""shape mismatch: {tuple(p.shape)} vs {tuple(g.shape)}.""")
    return p, g


def ssim_metric(pred, gt):
    """Mean SSIM in [-1, 1], computed in double precision with the same
    window and constants as :code:`ssim_loss`."""
    p, g = _pair(pred, gt)
    return float(ssim_index(p, g))


def ms_ssim_metric(pred, gt):
    p, g = _pair(pred, gt)
    return float(ms_ssim(p, g))


def psnr_metric(pred, gt):
    """Peak signal-to-noise ratio in dB for images in [0, 1].

    Returns
    -------
    psnr: float
        :code:`10 * log10(1 / MSE)`; identical images give :code:`inf`.
    """
    p, g = _pair(pred, gt)
    mse = float(((p - g) ** 2).mean())
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / mse)
