""" Convolutional blocks: plain, depthwise-separable, partial, multi-branch,
residual and resampling."""

# License: BSD 3 clause

import torch
from torch import nn

from ellie.blocks.base import (_BlockBase, block_kind, make_activation, make_norm,
                               norm_param_count, norm_is_global, half_kernel, ceil_share)
from ellie.errors import ConfigError
from ellie.reparam.branch import ConvBranchSpec, branch_forward, merge_branches


def _zero_(conv):
    nn.init.zeros_(conv.weight)
    if conv.bias is not None:
        nn.init.zeros_(conv.bias)


def _with(cfg, **changes):
    d = cfg.to_dict()
    d.update(changes)
    return type(cfg).from_dict(d)


@block_kind('conv')
class Conv(_BlockBase):
    """k x k same-padded convolution followed by an activation."""

    def __init__(self, cfg):
        super().__init__(cfg)
        self.conv = nn.Conv2d(cfg.in_channels, cfg.out_channels, cfg.kernel,
                              padding=cfg.kernel // 2, bias=cfg.bias)
        self.act = make_activation(cfg.activation)
        if cfg.zero_init:
            _zero_(self.conv)

    @classmethod
    def param_count(cls, cfg):
        return cfg.in_channels * cfg.out_channels * cfg.kernel ** 2 + cfg.out_channels * cfg.bias

    @classmethod
    def local_radius(cls, cfg):
        return half_kernel(cfg.kernel)

    def forward(self, x):
        return self.act(self.conv(x))


def dws_conv(x, cfg, block=None):
    """Depthwise k x k convolution (one filter per channel) followed by a
    pointwise 1 x 1 convolution and the configured activation.

    Parameters
    ----------
    x: tensor
        Features of shape (B, cfg.in_channels, H, W).
    cfg: BlockConfig
        Channels, kernel, bias and activation.
    block: DWSConv, default: None
        Trained weights built from :code:`cfg`. A fresh block is used when
        None.
    """
    return DWSConv.functional(x, cfg, block=block)


@block_kind('dws')
class DWSConv(_BlockBase):
    """Depthwise-separable convolution.

    Parameter count is :code:`in * k^2 + in * out` plus :code:`in + out`
    biases.
    """

    def __init__(self, cfg):
        super().__init__(cfg)
        c = cfg.in_channels
        self.depthwise = nn.Conv2d(c, c, cfg.kernel, padding=cfg.kernel // 2,
                                   groups=c, bias=cfg.bias)
        self.pointwise = nn.Conv2d(c, cfg.out_channels, 1, bias=cfg.bias)
        self.act = make_activation(cfg.activation)
        if cfg.zero_init:
            _zero_(self.pointwise)

    @classmethod
    def param_count(cls, cfg):
        c, o = cfg.in_channels, cfg.out_channels
        return c * cfg.kernel ** 2 + c * o + (c + o) * cfg.bias

    @classmethod
    def local_radius(cls, cfg):
        return half_kernel(cfg.kernel)

    def forward(self, x):
        return self.act(self.pointwise(self.depthwise(x)))


@block_kind('pconv')
class PartialConv(_BlockBase):
    """Convolve the first :code:`ceil(ratio * C)` channels and pass the rest
    through untouched."""

    def __init__(self, cfg):
        super().__init__(cfg)
        self.split = ceil_share(cfg.ratio, cfg.in_channels)
        self.conv = nn.Conv2d(self.split, self.split, cfg.kernel,
                              padding=cfg.kernel // 2, bias=cfg.bias)
        if cfg.zero_init:
            _zero_(self.conv)

    @classmethod
    def check(cls, cfg, in_channels):
        super().check(cfg, in_channels)
        if cfg.out_channels != cfg.in_channels:
            raise ConfigError("""partial convolution needs in_channels == out_channels.""")

    @classmethod
    def param_count(cls, cfg):
        cp = ceil_share(cfg.ratio, cfg.in_channels)
        return cp * cp * cfg.kernel ** 2 + cp * cfg.bias

    @classmethod
    def local_radius(cls, cfg):
        return half_kernel(cfg.kernel)

    def forward(self, x):
        head, tail = x[:, :self.split], x[:, self.split:]
        return torch.cat([self.conv(head), tail], dim=1)


def mbr_conv_forward(x, branches):
    """Sum of parallel same-padded convolution branches, each followed by
    its own stored normalization.

    Parameters
    ----------
    x: tensor
        Input of shape (B, in, H, W).
    branches: list of ConvBranchSpec
        Branches sharing input and output channels.
    """
    if len({(b.out_channels, b.in_channels) for b in branches}) != 1:
        raise ConfigError("""branches disagree on input/output channels.""")
    return sum(branch_forward(x, b) for b in branches)


@block_kind('mbr')
class MBRConv(_BlockBase):
    """Multi-branch convolution used during training and merged into a
    single kernel for inference.

    Every kernel shape in :code:`cfg.branches` becomes a bias-free
    convolution followed by batch normalization (or a biased convolution
    when :code:`use_bn` is off). With :code:`identity` set, a normalized
    shortcut is added as well.
    """

    def __init__(self, cfg):
        super().__init__(cfg)
        if cfg.identity and cfg.in_channels != cfg.out_channels:
            raise ConfigError("""identity branch needs in_channels == out_channels.""")
        self.convs = nn.ModuleList(
            nn.Conv2d(cfg.in_channels, cfg.out_channels, (kh, kw),
                      padding=(kh // 2, kw // 2), bias=not cfg.use_bn)
            for kh, kw in cfg.branches)
        self.norms = nn.ModuleList(
            nn.BatchNorm2d(cfg.out_channels) if cfg.use_bn else nn.Identity()
            for _ in cfg.branches)
        self.identity_norm = None
        if cfg.identity:
            self.identity_norm = nn.BatchNorm2d(cfg.out_channels) if cfg.use_bn else nn.Identity()
        self.act = make_activation(cfg.activation)

    @classmethod
    def check(cls, cfg, in_channels):
        super().check(cfg, in_channels)
        if cfg.identity and cfg.out_channels != cfg.in_channels:
            raise ConfigError("""identity branch needs in_channels == out_channels.""")

    @classmethod
    def param_count(cls, cfg):
        o = cfg.out_channels
        count = sum(cfg.in_channels * o * kh * kw for kh, kw in cfg.branches)
        count += len(cfg.branches) * (2 * o if cfg.use_bn else o)
        if cfg.identity and cfg.use_bn:
            count += 2 * o
        return count

    @classmethod
    def local_radius(cls, cfg):
        return max(max(kh, kw) for kh, kw in cfg.branches) // 2

    @property
    def target_kernel(self):
        return max(max(b) for b in self.cfg.branches)

    def branch_specs(self):
        """Current branches as ConvBranchSpec, using running statistics."""
        def norm_or_none(norm):
            return norm if isinstance(norm, nn.BatchNorm2d) else None

        specs = [ConvBranchSpec.from_modules(conv, norm_or_none(norm))
                 for conv, norm in zip(self.convs, self.norms)]
        if self.identity_norm is not None:
            specs.append(ConvBranchSpec.from_modules(None, norm_or_none(self.identity_norm),
                                                     self.cfg.out_channels))
        return specs

    def reparameterize(self):
        """Return the equivalent single-kernel :code:`conv` block."""
        merged = merge_branches(self.branch_specs(), self.target_kernel)
        block = Conv(reparameterized_config(self.cfg)).to(merged.weights.device,
                                                          merged.weights.dtype)
        with torch.no_grad():
            block.conv.weight.copy_(merged.weights)
            block.conv.bias.copy_(merged.bias)
        return block

    def forward(self, x):
        y = sum(norm(conv(x)) for conv, norm in zip(self.convs, self.norms))
        if self.identity_norm is not None:
            y = y + self.identity_norm(x)
        return self.act(y)


def reparameterized_config(cfg):
    """BlockConfig of the single convolution a multi-branch node merges
    into."""
    return _with(cfg, kernel=max(max(b) for b in cfg.branches), bias=True,
                 branches=((3, 3),), identity=False, zero_init=False)


@block_kind('res_dws')
class ResidualDWSBlock(_BlockBase):
    """norm -> dws -> GELU -> dws with an identity shortcut."""

    def __init__(self, cfg):
        super().__init__(cfg)
        c = cfg.in_channels
        self.norm = make_norm(cfg.norm, c)
        self.conv1 = DWSConv(_with(cfg, out_channels=c, activation='gelu'))
        self.conv2 = DWSConv(_with(cfg, out_channels=c, activation='none'))

    @classmethod
    def check(cls, cfg, in_channels):
        super().check(cfg, in_channels)
        if cfg.out_channels != cfg.in_channels:
            raise ConfigError("""residual block needs in_channels == out_channels.""")

    @classmethod
    def param_count(cls, cfg):
        c = cfg.in_channels
        inner = DWSConv.param_count(_with(cfg, out_channels=c))
        return norm_param_count(cfg.norm, c) + 2 * inner

    @classmethod
    def global_context(cls, cfg):
        return norm_is_global(cfg.norm)

    @classmethod
    def local_radius(cls, cfg):
        return 2 * half_kernel(cfg.kernel)

    def forward(self, x):
        return x + self.conv2(self.conv1(self.norm(x)))


@block_kind('down')
class Downsample(_BlockBase):
    """Halve resolution by pixel unshuffling, then mix with a 1 x 1 conv."""

    scale_factor = 0.5

    def __init__(self, cfg):
        super().__init__(cfg)
        self.unshuffle = nn.PixelUnshuffle(2)
        self.conv = nn.Conv2d(4 * cfg.in_channels, cfg.out_channels, 1, bias=cfg.bias)

    @classmethod
    def param_count(cls, cfg):
        return 4 * cfg.in_channels * cfg.out_channels + cfg.out_channels * cfg.bias

    @classmethod
    def local_radius(cls, cfg):
        return 1

    def forward(self, x):
        return self.conv(self.unshuffle(x))


@block_kind('up')
class Upsample(_BlockBase):
    """Double resolution with a 1 x 1 conv and pixel shuffling."""

    scale_factor = 2.0

    def __init__(self, cfg):
        super().__init__(cfg)
        self.conv = nn.Conv2d(cfg.in_channels, 4 * cfg.out_channels, 1, bias=cfg.bias)
        self.shuffle = nn.PixelShuffle(2)

    @classmethod
    def param_count(cls, cfg):
        return 4 * cfg.out_channels * (cfg.in_channels + cfg.bias)

    @classmethod
    def local_radius(cls, cfg):
        return 1

    def forward(self, x):
        return self.shuffle(self.conv(x))


@block_kind('norm')
class Norm(_BlockBase):
    """Standalone normalization layer."""

    def __init__(self, cfg):
        super().__init__(cfg)
        self.norm = make_norm(cfg.norm, cfg.in_channels)

    @classmethod
    def param_count(cls, cfg):
        return norm_param_count(cfg.norm, cfg.in_channels)

    @classmethod
    def global_context(cls, cfg):
        return norm_is_global(cfg.norm)

    def forward(self, x):
        return self.norm(x)
