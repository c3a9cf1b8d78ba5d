""" Fourier phase transfer between feature maps."""

# License: BSD 3 clause

import torch

from ellie.blocks.base import _BlockBase, block_kind
from ellie.errors import ConfigError, ShapeError

PHASE_EPS = 1e-8


def phase_transfer(feat_a, feat_b):
    """Combine the amplitude spectrum of :code:`feat_a` with the phase
    spectrum of :code:`feat_b`, per channel.

    Frequency bins where :code:`|FFT(feat_b)| <= 1e-8` have no defined phase
    and keep the phase of :code:`feat_a`.

    Parameters
    ----------
    feat_a: tensor
        Amplitude source of shape (..., H, W).
    feat_b: tensor
        Phase source, same shape as :code:`feat_a`.

    Returns
    -------
    out: tensor
        Real part of the inverse FFT of the combined spectrum.
    """
    if feat_a.shape != feat_b.shape:
        raise ShapeError(f"""phase_transfer needs identical shapes, got"""
                         f""" {tuple(feat_a.shape)} and {tuple(feat_b.shape)}.""")
    spec_a = torch.fft.fft2(feat_a)
    spec_b = torch.fft.fft2(feat_b)
    amp_a, amp_b = spec_a.abs(), spec_b.abs()

    defined = amp_b > PHASE_EPS
    safe_b = torch.where(defined, amp_b, torch.ones_like(amp_b))
    combined = torch.where(defined, amp_a * spec_b / safe_b, spec_a)
    return torch.fft.ifft2(combined).real


@block_kind('ptb')
class PhaseTransfer(_BlockBase):
    """Graph block for :code:`phase_transfer`: first input gives the
    amplitude, second the phase."""

    n_inputs = 2

    @classmethod
    def check(cls, cfg, in_channels):
        if list(in_channels) != [cfg.in_channels, cfg.in_channels] \
                or cfg.out_channels != cfg.in_channels:
            raise ConfigError(f"""ptb expects two inputs of {cfg.in_channels} channels,"""
                              f""" got {in_channels}.""")

    @classmethod
    def global_context(cls, cfg):
        return True

    def forward(self, feat_a, feat_b):
        return phase_transfer(feat_a, feat_b)
