""" Luminance-conditioned feature modulation."""

# License: BSD 3 clause

import torch
import torch.nn.functional as F
from torch import nn

from ellie.blocks.base import _BlockBase, block_kind
from ellie.colorspace import luminance_scalar
from ellie.errors import ConfigError, DomainError


def _as_luminance(luminance, batch, like):
    """Per-image luminance scalar of shape (B, 1, 1, 1)."""
    if torch.is_tensor(luminance) and luminance.dim() == 4:
        if luminance.shape[1] == 3:
            luminance = luminance_scalar(luminance)
        else:
            luminance = luminance.mean(dim=(-3, -2, -1))
    lum = torch.as_tensor(luminance, dtype=like.dtype, device=like.device)
    if bool((lum < 0).any()) or bool((lum > 1).any()):
        raise DomainError("""luminance must lie in [0, 1].""")
    return lum.reshape(-1, 1, 1, 1).expand(batch, 1, 1, 1)


@block_kind('icn')
class ICNModulate(_BlockBase):
    """Instance normalization with gain and shift that are affine functions
    of a global luminance scalar L:

    .. math::

        y = (g_0 + g_1 L) \\cdot \\mathrm{norm}(x) + (b_0 + b_1 L)

    :code:`g_0` starts at one and the other coefficients at zero, so the
    block begins as plain normalization.
    """

    n_inputs = 2

    def __init__(self, cfg):
        super().__init__(cfg)
        c = cfg.in_channels
        self.gain0 = nn.Parameter(torch.ones(c))
        self.gain1 = nn.Parameter(torch.zeros(c))
        self.shift0 = nn.Parameter(torch.zeros(c))
        self.shift1 = nn.Parameter(torch.zeros(c))

    @classmethod
    def check(cls, cfg, in_channels):
        if len(in_channels) != 2 or in_channels[0] != cfg.in_channels:
            raise ConfigError(f"""icn expects [{cfg.in_channels}, any] input channels,"""
                              f""" got {in_channels}.""")
        if cfg.out_channels != cfg.in_channels:
            raise ConfigError("""icn keeps the channel count.""")

    @classmethod
    def param_count(cls, cfg):
        return 4 * cfg.in_channels

    @classmethod
    def global_context(cls, cfg):
        return True

    def affine(self, luminance):
        """Gain and shift, each of shape (B, C, 1, 1)."""
        view = (1, -1, 1, 1)
        gain = self.gain0.view(view) + self.gain1.view(view) * luminance
        shift = self.shift0.view(view) + self.shift1.view(view) * luminance
        return gain, shift

    def forward(self, x, luminance):
        lum = _as_luminance(luminance, x.shape[0], x)
        gain, shift = self.affine(lum)
        return gain * F.instance_norm(x) + shift


def icn_modulate(x, luminance, cfg, block=None):
    """Functional form of :code:`ICNModulate`; :code:`block` holds trained
    coefficients, otherwise a fresh block (plain instance norm) is used."""
    return ICNModulate.functional(x, cfg, luminance, block=block)


@block_kind('illum_adjust')
class IlluminationAdjust(_BlockBase):
    """Global curve on an illumination map:
    :code:`clamp(L ** exp(a), eps, 1)` with a learnable exponent a that
    starts at zero (identity)."""

    def __init__(self, cfg):
        super().__init__(cfg)
        self.eps = cfg.options.get('eps', 1e-2)
        self.log_exponent = nn.Parameter(torch.zeros(()))

    @classmethod
    def param_count(cls, cfg):
        return 1

    def forward(self, illumination):
        base = illumination.clamp(self.eps, 1.0)
        return base.pow(torch.exp(self.log_exponent)).clamp(self.eps, 1.0)
