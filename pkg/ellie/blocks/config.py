""" Configuration shared by every block kind."""

# License: BSD 3 clause

from dataclasses import dataclass, field, asdict

from ellie.errors import ConfigError

NORM_KINDS = ('group', 'layer', 'batch', 'none')
ACTIVATIONS = ('none', 'gelu', 'relu', 'lrelu', 'sigmoid')


@dataclass
class BlockConfig:
    """Hyper-parameters of one block. Kinds ignore fields they do not use.

    Parameters
    ----------
    in_channels: int, default: 3
        Channels of the (first) input. Must be at least 1.
    out_channels: int, default: None
        Output channels. Defaults to :code:`in_channels`.
    kernel: int, default: 3
        Odd spatial kernel size.
    bias: bool, default: True
        Whether convolutions carry a bias.
    activation: str, default: 'none'
        One of 'none', 'gelu', 'relu', 'lrelu', 'sigmoid'.
    norm: str, default: 'group'
        One of 'group', 'layer', 'batch', 'none'.
    expansion: float, default: 2.0
        Hidden width multiplier (NAF blocks).
    reduction: float, default: 4
        Channel reduction of channel attention. Must divide the channels.
    ratio: float, default: 1.0
        Convolved share of a partial convolution. Must be in (0, 1].
    heads: int, default: 1
        Attention heads. Must divide :code:`embed`.
    embed: int, default: None
        Attention width. Defaults to :code:`in_channels`.
    kv_channels: int, default: None
        Channels of the key/value source. Defaults to :code:`in_channels`.
    window: int, default: 8
        Attention window side; None for global attention.
    branches: tuple of (int, int), default: ((3, 3),)
        Kernel shapes of a multi-branch convolution.
    use_bn: bool, default: True
        Follow every multi-branch kernel with batch normalization.
    identity: bool, default: False
        Add a normalized identity branch to a multi-branch convolution.
    use_sca: bool, default: True
        Use simplified channel attention inside NAF blocks.
    zero_init: bool, default: False
        Start convolution weights and biases at zero.
    options: dict, default: {}
        Kind-specific settings (graph ops, preprocessors).
    """
    in_channels: int = 3
    out_channels: int = None
    kernel: int = 3
    bias: bool = True
    activation: str = 'none'
    norm: str = 'group'
    expansion: float = 2.0
    reduction: float = 4
    ratio: float = 1.0
    heads: int = 1
    embed: int = None
    kv_channels: int = None
    window: int = 8
    branches: tuple = ((3, 3),)
    use_bn: bool = True
    identity: bool = False
    use_sca: bool = True
    zero_init: bool = False
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.out_channels is None:
            self.out_channels = self.in_channels
        if self.embed is None:
            self.embed = self.in_channels
        if self.kv_channels is None:
            self.kv_channels = self.in_channels

        for name in ('in_channels', 'out_channels', 'embed', 'kv_channels', 'heads'):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ConfigError(f"""{name} must be an integer of at least 1.""")

        if self.kernel < 1 or self.kernel % 2 == 0:
            raise ConfigError("""kernel must be a positive odd integer.""")

        if not 0 < self.ratio <= 1:
            raise ConfigError("""ratio must be in (0, 1].""")

        if self.expansion <= 0 or self.reduction <= 0:
            raise ConfigError("""expansion and reduction must be greater than 0.""")

        if self.window is not None and self.window < 1:
            raise ConfigError("""window must be at least 1 or None.""")

        if self.norm not in NORM_KINDS:
            raise ConfigError(f"""norm must be one of {NORM_KINDS}.""")

        if self.activation not in ACTIVATIONS:
            raise ConfigError(f"""activation must be one of {ACTIVATIONS}.""")

        self.branches = tuple(tuple(int(s) for s in b) for b in self.branches)
        if len(self.branches) == 0:
            raise ConfigError("""branches must not be empty.""")
        for kh, kw in self.branches:
            if kh < 1 or kw < 1 or kh % 2 == 0 or kw % 2 == 0:
                raise ConfigError(f"""branch kernel ({kh}, {kw}) must be odd.""")

    def to_dict(self):
        d = asdict(self)
        d['branches'] = [list(b) for b in self.branches]
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(**d)
