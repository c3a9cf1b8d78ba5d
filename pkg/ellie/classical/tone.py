""" Differentiable pixel-wise tone operators."""

# License: BSD 3 clause

import torch

from ellie.colorspace._checks import check_positive
from ellie.errors import ShapeError

GAMMA_BASE_FLOOR = 1e-6


def apply_gamma_map(img, gamma_map):
    """Raise every pixel to its own exponent.

    Parameters
    ----------
    img: tensor
        Image of shape (..., C, H, W) with values in [0, 1].
    gamma_map: tensor
        Exponents of shape (..., 1, H, W) or (..., C, H, W). All values
        must be greater than 0.

    Returns
    -------
    out: tensor
        :code:`max(img, 1e-6) ** gamma_map`, differentiable in both inputs.
    """
    if gamma_map.shape[-2:] != img.shape[-2:]:
        raise ShapeError(f"""gamma_map spatial dims {tuple(gamma_map.shape[-2:])}"""
                         f""" do not match img {tuple(img.shape[-2:])}.""")
    if gamma_map.shape[-3] not in (1, img.shape[-3]):
        raise ShapeError("""gamma_map must have 1 channel or as many as img.""")
    check_positive(gamma_map, 'gamma_map')

    return img.clamp(min=GAMMA_BASE_FLOOR).pow(gamma_map)


def exposure_fusion(exposures, logits):
    """Blend exposures with per-pixel softmax weights.

    Parameters
    ----------
    exposures: list of tensors
        N images of identical shape (..., C, H, W).
    logits: tensor
        Unnormalized weights of shape (..., N, H, W).

    Returns
    -------
    fused: tensor
        :code:`sum_i softmax(logits)_i * exposures[i]`.
    """
    if len(exposures) == 0:
        raise ShapeError("""exposures must not be empty.""")
    shape = exposures[0].shape
    if any(e.shape != shape for e in exposures):
        raise ShapeError("""all exposures must share one shape.""")
    if logits.shape[-3] != len(exposures):
        raise ShapeError(f"""logits has {logits.shape[-3]} channels for"""
                         f""" {len(exposures)} exposures.""")
    if logits.shape[-2:] != shape[-2:]:
        raise ShapeError("""logits spatial dims do not match the exposures.""")

    weights = torch.softmax(logits, dim=-3)
    return sum(weights[..., i:i + 1, :, :] * e for i, e in enumerate(exposures))
