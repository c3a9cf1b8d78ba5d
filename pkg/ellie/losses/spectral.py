""" Frequency-domain and gradient losses."""

# License: BSD 3 clause

import torch
import torch.nn.functional as F

from ellie.losses.pixel import check_pair

_SOBEL_X = torch.tensor([[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]])


def frequency_loss(pred, gt):
    """Mean L1 distance between the (unnormalized) 2-D FFT amplitude spectra
    of each channel."""
    check_pair(pred, gt)
    return (torch.fft.fft2(pred).abs() - torch.fft.fft2(gt).abs()).abs().mean()


def sobel_magnitude(img, eps=1e-12):
    """Per-channel Sobel gradient magnitude with replicate padding."""
    channels = img.shape[1]
    kx = _SOBEL_X.to(img).view(1, 1, 3, 3).expand(channels, 1, 3, 3)
    ky = kx.transpose(-2, -1)
    padded = F.pad(img, (1, 1, 1, 1), mode='replicate')
    gx = F.conv2d(padded, kx, groups=channels)
    gy = F.conv2d(padded, ky, groups=channels)
    return torch.sqrt(gx ** 2 + gy ** 2 + eps)


def gradient_edge_loss(pred, gt):
    """Mean L1 distance between Sobel gradient magnitudes."""
    check_pair(pred, gt)
    return (sobel_magnitude(pred) - sobel_magnitude(gt)).abs().mean()
