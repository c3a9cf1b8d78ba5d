""" Argument checks shared by the color-space transforms."""

# License: BSD 3 clause

import torch

from ellie.errors import ShapeError, DomainError


def check_channels(img, channels, name='img'):
    """Raise a ShapeError unless :code:`img` is a (..., channels, H, W)
    tensor."""
    if not torch.is_tensor(img):
        raise ShapeError(f"""{name} must be a torch tensor.""")
    if img.dim() < 3 or img.shape[-3] != channels:
        raise ShapeError(f"""{name} must have {channels} channels on axis -3,"""
                         f""" got shape {tuple(img.shape)}.""")


def check_positive(value, name):
    """Raise a DomainError unless :code:`value` (scalar or tensor) is
    strictly positive everywhere."""
    if torch.is_tensor(value):
        if not bool((value > 0).all()):
            raise DomainError(f"""{name} must be greater than 0.""")
    elif not value > 0:
        raise DomainError(f"""{name} must be greater than 0.""")


def channel(img, index):
    return img[..., index:index + 1, :, :]
