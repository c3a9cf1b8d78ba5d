""" SSIM and multi-scale SSIM.

Windows are Gaussian (11 taps, sigma 1.5) and applied without padding, so
only windows fully inside the image contribute. Constants assume a [0, 1]
value range: c1 = 0.01^2, c2 = 0.03^2.
"""

# License: BSD 3 clause

import torch
import torch.nn.functional as F

from ellie.errors import ConfigError
from ellie.losses.pixel import check_pair

C1 = 0.01 ** 2
C2 = 0.03 ** 2
MS_SSIM_WEIGHTS = (0.0448, 0.2856, 0.3001, 0.2363, 0.1333)


def gaussian_window(size=11, sigma=1.5, dtype=torch.float32, device=None):
    """Normalized 1-D Gaussian of :code:`size` taps."""
    coords = torch.arange(size, dtype=dtype, device=device) - (size - 1) / 2.0
    g = torch.exp(-(coords ** 2) / (2 * sigma ** 2))
    return g / g.sum()


def _filter(x, window):
    channels, size = x.shape[1], window.shape[0]
    x = F.conv2d(x, window.view(1, 1, 1, size).expand(channels, 1, 1, size), groups=channels)
    return F.conv2d(x, window.view(1, 1, size, 1).expand(channels, 1, size, 1), groups=channels)


def ssim_components(pred, gt, window=11, sigma=1.5, c1=C1, c2=C2):
    """Per-window SSIM and contrast-structure maps.

    Returns
    -------
    ssim_map, cs_map: tensors
        Shape (B, C, H - window + 1, W - window + 1).
    """
    check_pair(pred, gt)
    if min(pred.shape[-2:]) < window:
        raise ConfigError(f"""image {tuple(pred.shape[-2:])} is smaller than the"""
                          f""" {window}-pixel SSIM window.""")
    w = gaussian_window(window, sigma, pred.dtype, pred.device)
    mu_p, mu_g = _filter(pred, w), _filter(gt, w)
    var_p = _filter(pred * pred, w) - mu_p ** 2
    var_g = _filter(gt * gt, w) - mu_g ** 2
    cov = _filter(pred * gt, w) - mu_p * mu_g

    cs_map = (2 * cov + c2) / (var_p + var_g + c2)
    ssim_map = (2 * mu_p * mu_g + c1) / (mu_p ** 2 + mu_g ** 2 + c1) * cs_map
    return ssim_map, cs_map


def ssim_index(pred, gt, window=11, sigma=1.5, c1=C1, c2=C2):
    """Mean SSIM over all windows, channels and images."""
    return ssim_components(pred, gt, window, sigma, c1, c2)[0].mean()


def ssim_loss(pred, gt, window=11, sigma=1.5, c1=C1, c2=C2):
    """:code:`1 - SSIM`, in [0, 2]."""
    return 1.0 - ssim_index(pred, gt, window, sigma, c1, c2)


def ms_ssim(pred, gt, scales=5, window=11, sigma=1.5, weights=MS_SSIM_WEIGHTS):
    """Multi-scale SSIM: contrast-structure terms of the first scales and
    the full SSIM of the coarsest scale, combined with the canonical
    weights. Images are halved by 2x2 average pooling between scales.
    """
    check_pair(pred, gt)
    if scales < 1 or scales > len(weights):
        raise ConfigError(f"""scales must be between 1 and {len(weights)}.""")
    needed = window * 2 ** (scales - 1)
    if min(pred.shape[-2:]) < needed:
        raise ConfigError(f"""image {tuple(pred.shape[-2:])} is smaller than"""
                          f""" {needed} pixels needed for {scales}-scale MS-SSIM.""")

    w = torch.tensor(weights[:scales], dtype=pred.dtype, device=pred.device)
    w = w / w.sum()
    values = []
    for i in range(scales):
        ssim_map, cs_map = ssim_components(pred, gt, window, sigma)
        term = ssim_map if i == scales - 1 else cs_map
        values.append(term.mean(dim=(-2, -1)).clamp(min=1e-8))
        if i < scales - 1:
            pred, gt = F.avg_pool2d(pred, 2), F.avg_pool2d(gt, 2)
    stacked = torch.stack(values, dim=0)
    return torch.prod(stacked ** w.view(-1, *([1] * (stacked.dim() - 1))), dim=0).mean()


def ms_ssim_loss(pred, gt, scales=5):
    """:code:`1 - MS-SSIM`."""
    return 1.0 - ms_ssim(pred, gt, scales)
