""" Block registry, base class, normalization and activation helpers."""

# License: BSD 3 clause

import math

import torch
from torch import nn

from ellie.decorators import short_name
from ellie.errors import ConfigError, ShapeError

BLOCK_KINDS = {}


def block_kind(name):
    """Register a block class under :code:`name` in BLOCK_KINDS."""
    return short_name(name, BLOCK_KINDS)


class _BlockBase(nn.Module):
    """Base class of every graph block.

    Subclasses compute their learnable-scalar count and receptive radius
    from a BlockConfig alone, so model graphs can be audited without
    instantiation.
    """

    # output resolution relative to the input
    scale_factor = 1.0

    def __init__(self, cfg):
        super().__init__()
        self.cfg = cfg

    @classmethod
    def param_count(cls, cfg):
        return 0

    @classmethod
    def global_context(cls, cfg):
        return False

    @classmethod
    def local_radius(cls, cfg):
        return 0

    @classmethod
    def receptive_radius(cls, cfg):
        """Half-width of the input window each output pixel depends on, or
        None when the output depends on the whole image."""
        return None if cls.global_context(cfg) else cls.local_radius(cfg)

    @classmethod
    def check(cls, cfg, in_channels):
        """Raise a ConfigError unless :code:`in_channels` (one entry per
        input) fits :code:`cfg`."""
        if len(in_channels) != 1 or in_channels[0] != cfg.in_channels:
            raise ConfigError(f"""{cls.__name__} expects {cfg.in_channels} input"""
                              f""" channels, got {in_channels}.""")

    @classmethod
    def out_channels(cls, cfg):
        return cfg.out_channels

    @classmethod
    def functional(cls, x, cfg, *args, block=None):
        """Run the block described by :code:`cfg` on x.

        :code:`block` supplies trained weights and must have been built from
        :code:`cfg`; when None a freshly initialized block on x's device and
        dtype is used. Extra positional arguments go to :code:`forward`.
        """
        if x.dim() != 4 or x.shape[1] != cfg.in_channels:
            raise ShapeError(f"""{cls.__name__} expects input of shape"""
                             f""" (B, {cfg.in_channels}, H, W), got {tuple(x.shape)}.""")
        if block is None:
            block = cls(cfg).to(x.device, x.dtype)
        elif not isinstance(block, cls) or block.cfg != cfg:
            raise ConfigError(f"""block is not a {cls.__name__} built from this config.""")
        return block(x, *args)


def group_count(channels):
    """Largest divisor of :code:`channels` not above 8."""
    return max(g for g in range(1, min(8, channels) + 1) if channels % g == 0)


class LayerNorm2d(nn.Module):
    """Per-pixel normalization over channels with a learnable affine map."""

    def __init__(self, channels, eps=1e-6):
        super().__init__()
        self.eps = eps
        self.weight = nn.Parameter(torch.ones(channels))
        self.bias = nn.Parameter(torch.zeros(channels))

    def forward(self, x):
        mu = x.mean(dim=1, keepdim=True)
        var = (x - mu).pow(2).mean(dim=1, keepdim=True)
        y = (x - mu) / torch.sqrt(var + self.eps)
        return self.weight.view(1, -1, 1, 1) * y + self.bias.view(1, -1, 1, 1)


def make_norm(kind, channels):
    if kind == 'group':
        return nn.GroupNorm(group_count(channels), channels)
    if kind == 'layer':
        return LayerNorm2d(channels)
    if kind == 'batch':
        return nn.BatchNorm2d(channels)
    if kind == 'none':
        return nn.Identity()
    raise ConfigError(f"""Unknown norm '{kind}'.""")


def norm_param_count(kind, channels):
    return 0 if kind == 'none' else 2 * channels


def norm_is_global(kind):
    return kind == 'group'


def make_activation(name):
    return {'none': nn.Identity, 'gelu': nn.GELU, 'relu': nn.ReLU,
            'lrelu': lambda: nn.LeakyReLU(0.2), 'sigmoid': nn.Sigmoid}[name]()


def half_kernel(kernel):
    return kernel // 2


def ceil_share(ratio, channels):
    return math.ceil(round(ratio * channels, 9))
