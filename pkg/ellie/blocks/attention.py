""" Attention and gating blocks."""

# License: BSD 3 clause

import torch
import torch.nn.functional as F
from torch import nn

from ellie.blocks.base import _BlockBase, block_kind, LayerNorm2d, half_kernel
from ellie.errors import ConfigError, ShapeError


def _mid_channels(cfg):
    channels = cfg.in_channels
    mid = channels / cfg.reduction
    if mid != int(mid) or mid < 1:
        raise ConfigError(f"""reduction {cfg.reduction} does not divide {channels} channels.""")
    return int(mid)


@block_kind('ca')
class ChannelAttention(_BlockBase):
    """Squeeze-and-excitation channel attention.

    Global average pooling, a bottleneck of :code:`C / reduction` channels
    and a sigmoid give one weight in [0, 1] per channel.
    """

    def __init__(self, cfg):
        super().__init__(cfg)
        mid = _mid_channels(cfg)
        self.pool = nn.AdaptiveAvgPool2d(1)
        self.squeeze = nn.Conv2d(cfg.in_channels, mid, 1)
        self.excite = nn.Conv2d(mid, cfg.in_channels, 1)

    @classmethod
    def check(cls, cfg, in_channels):
        super().check(cfg, in_channels)
        _mid_channels(cfg)

    @classmethod
    def param_count(cls, cfg):
        c, mid = cfg.in_channels, _mid_channels(cfg)
        return 2 * c * mid + mid + c

    @classmethod
    def global_context(cls, cfg):
        return True

    def weights(self, x):
        return torch.sigmoid(self.excite(F.relu(self.squeeze(self.pool(x)))))

    def forward(self, x):
        return x * self.weights(x)


@block_kind('sca')
class SimplifiedChannelAttention(_BlockBase):
    """Channel attention reduced to one linear 1 x 1 conv on the pooled
    vector; the weights are not squashed."""

    def __init__(self, cfg):
        super().__init__(cfg)
        self.pool = nn.AdaptiveAvgPool2d(1)
        self.conv = nn.Conv2d(cfg.in_channels, cfg.in_channels, 1)

    @classmethod
    def param_count(cls, cfg):
        return cfg.in_channels ** 2 + cfg.in_channels

    @classmethod
    def global_context(cls, cfg):
        return True

    def weights(self, x):
        return self.conv(self.pool(x))

    def forward(self, x):
        return x * self.weights(x)


@block_kind('spatial_gate')
class SpatialGate(_BlockBase):
    """Scale every pixel by a sigmoid map predicted by a k x k conv."""

    def __init__(self, cfg):
        super().__init__(cfg)
        self.conv = nn.Conv2d(cfg.in_channels, 1, cfg.kernel, padding=cfg.kernel // 2)

    @classmethod
    def param_count(cls, cfg):
        return cfg.in_channels * cfg.kernel ** 2 + 1

    @classmethod
    def local_radius(cls, cfg):
        return half_kernel(cfg.kernel)

    def forward(self, x):
        return x * torch.sigmoid(self.conv(x))


def simple_gate(x):
    """Split channels into halves a and b and return :code:`a * b`."""
    channels = x.shape[1]
    if channels % 2:
        raise ShapeError(f"""simple_gate needs an even channel count, got {channels}.""")
    a, b = x.chunk(2, dim=1)
    return a * b


@block_kind('gate')
class SimpleGate(_BlockBase):

    @classmethod
    def check(cls, cfg, in_channels):
        super().check(cfg, in_channels)
        if cfg.in_channels % 2 or cfg.out_channels * 2 != cfg.in_channels:
            raise ConfigError("""gate needs an even in_channels and out_channels = in / 2.""")

    def forward(self, x):
        return simple_gate(x)


@block_kind('naf')
class NAFBlock(_BlockBase):
    """Activation-free residual block.

    layer norm -> 1x1 expand -> depthwise k x k -> simple gate ->
    optional simplified channel attention -> 1x1 project, added to the
    input.
    """

    def __init__(self, cfg):
        super().__init__(cfg)
        c, hidden = cfg.in_channels, self.hidden_channels(cfg)
        self.norm = LayerNorm2d(c)
        self.expand = nn.Conv2d(c, hidden, 1)
        self.depthwise = nn.Conv2d(hidden, hidden, cfg.kernel, padding=cfg.kernel // 2,
                                   groups=hidden)
        self.sca = None
        if cfg.use_sca:
            half = hidden // 2
            self.sca = nn.Sequential(nn.AdaptiveAvgPool2d(1), nn.Conv2d(half, half, 1))
        self.project = nn.Conv2d(hidden // 2, c, 1)

    @staticmethod
    def hidden_channels(cfg):
        hidden = int(round(cfg.in_channels * cfg.expansion))
        if hidden < 2 or hidden % 2:
            raise ConfigError(f"""NAF hidden width {hidden} must be even.""")
        return hidden

    @classmethod
    def check(cls, cfg, in_channels):
        super().check(cfg, in_channels)
        if cfg.out_channels != cfg.in_channels:
            raise ConfigError("""NAF block needs in_channels == out_channels.""")
        cls.hidden_channels(cfg)

    @classmethod
    def param_count(cls, cfg):
        c, h = cfg.in_channels, cls.hidden_channels(cfg)
        half = h // 2
        count = 2 * c + (c * h + h) + (h * cfg.kernel ** 2 + h) + (half * c + c)
        if cfg.use_sca:
            count += half * half + half
        return count

    @classmethod
    def global_context(cls, cfg):
        return cfg.use_sca

    @classmethod
    def local_radius(cls, cfg):
        return half_kernel(cfg.kernel)

    def forward(self, x):
        y = simple_gate(self.depthwise(self.expand(self.norm(x))))
        if self.sca is not None:
            y = y * self.sca(y)
        return x + self.project(y)


def _partition(x, heads, wh, ww):
    b, e, h, w = x.shape
    x = x.view(b, heads, e // heads, h // wh, wh, w // ww, ww)
    x = x.permute(0, 3, 5, 1, 4, 6, 2)
    return x.reshape(-1, heads, wh * ww, e // heads)


def _merge(x, b, e, h, w, wh, ww):
    heads, d = x.shape[1], x.shape[-1]
    x = x.view(b, h // wh, w // ww, heads, wh, ww, d)
    return x.permute(0, 3, 6, 1, 4, 2, 5).reshape(b, e, h, w)


@block_kind('xattn')
class CrossAttention(_BlockBase):
    """Multi-head cross attention: queries from one feature map, keys and
    values from another.

    Attention runs inside non-overlapping :code:`window x window` windows
    (positions outside the image are masked), or over the whole image when
    :code:`cfg.window` is None. The output is projected back to the query
    channels.

    Parameters
    ----------
    cfg: BlockConfig
        :code:`in_channels` gives the query channels, :code:`kv_channels`
        the key/value channels, :code:`embed` the attention width and
        :code:`heads` the number of heads, which must divide :code:`embed`.
    """

    n_inputs = 2

    def __init__(self, cfg):
        super().__init__(cfg)
        if cfg.embed % cfg.heads:
            raise ConfigError(f"""heads {cfg.heads} do not divide embed {cfg.embed}.""")
        self.query = nn.Conv2d(cfg.in_channels, cfg.embed, 1)
        self.key = nn.Conv2d(cfg.kv_channels, cfg.embed, 1)
        self.value = nn.Conv2d(cfg.kv_channels, cfg.embed, 1)
        self.project = nn.Conv2d(cfg.embed, cfg.in_channels, 1)

    @classmethod
    def check(cls, cfg, in_channels):
        if list(in_channels) != [cfg.in_channels, cfg.kv_channels]:
            raise ConfigError(f"""cross attention expects inputs of"""
                              f""" {[cfg.in_channels, cfg.kv_channels]} channels,"""
                              f""" got {in_channels}.""")
        if cfg.out_channels != cfg.in_channels:
            raise ConfigError("""cross attention output matches the query channels.""")
        if cfg.embed % cfg.heads:
            raise ConfigError(f"""heads {cfg.heads} do not divide embed {cfg.embed}.""")

    @classmethod
    def param_count(cls, cfg):
        q, kv, e = cfg.in_channels, cfg.kv_channels, cfg.embed
        return (q * e + e) + 2 * (kv * e + e) + (e * q + q)

    @classmethod
    def global_context(cls, cfg):
        return True

    def forward(self, query_src, kv_src, return_attention=False):
        if query_src.shape[-2:] != kv_src.shape[-2:]:
            raise ShapeError("""query and key/value sources must share spatial dims.""")
        if query_src.shape[1] != self.cfg.in_channels or kv_src.shape[1] != self.cfg.kv_channels:
            raise ShapeError("""cross attention input channels do not match its config.""")

        b, _, h, w = query_src.shape
        e, heads = self.cfg.embed, self.cfg.heads
        wh, ww = (h, w) if self.cfg.window is None else (self.cfg.window, self.cfg.window)
        pad_h, pad_w = (-h) % wh, (-w) % ww

        def prep(t):
            return _partition(F.pad(t, (0, pad_w, 0, pad_h)), heads, wh, ww)

        q, k, v = prep(self.query(query_src)), prep(self.key(kv_src)), prep(self.value(kv_src))

        valid = F.pad(torch.ones(1, 1, h, w, device=query_src.device), (0, pad_w, 0, pad_h))
        valid = (_partition(valid, 1, wh, ww) > 0.5).view(1, -1, 1, 1, wh * ww)
        valid = valid.expand(b, -1, 1, 1, -1).reshape(-1, 1, 1, wh * ww)

        logits = torch.matmul(q, k.transpose(-2, -1)) * (e // heads) ** -0.5
        attention = torch.softmax(logits.masked_fill(~valid, float('-inf')), dim=-1)
        out = torch.matmul(attention, v)

        out = _merge(out, b, e, h + pad_h, w + pad_w, wh, ww)[..., :h, :w]
        out = self.project(out)
        return (out, attention) if return_attention else out
