""" Parameter-free graph nodes: the graph input, tensor ops, the Retinex
reconstruction head and the frozen preprocessor stack."""

# License: BSD 3 clause

import torch

from ellie.blocks.base import _BlockBase, block_kind
from ellie.classical import Preprocessor
from ellie.errors import ConfigError

RETINEX_EPS = 1e-2


def retinex_reconstruct(x, illumination, residual, eps=RETINEX_EPS):
    """Light up an image from predicted illumination and noise residual:
    :code:`clamp(x / max(L, eps) - N, 0, 1)`."""
    return (x / illumination.clamp(min=eps) - residual).clamp(0.0, 1.0)


def to_illumination(raw, eps=RETINEX_EPS):
    """Squash raw predictions into an illumination map in [eps, 1]."""
    return eps + (1.0 - eps) * torch.sigmoid(raw)


@block_kind('input')
class GraphInput(_BlockBase):

    @classmethod
    def check(cls, cfg, in_channels):
        if in_channels:
            raise ConfigError("""the input node takes no inputs.""")

    def forward(self, x):
        return x


OPS = ('identity', 'slice', 'illumination', 'divide', 'multiply', 'retinex')


@block_kind('op')
class GraphOp(_BlockBase):
    """Tensor op selected by :code:`cfg.options['op']`.

    * identity: pass the (merged) input through.
    * slice: channels :code:`start:stop`.
    * illumination: :code:`eps + (1 - eps) * sigmoid(x)`.
    * divide: first input over :code:`max(second, eps)`.
    * multiply: first input times second.
    * retinex: inputs (x, raw) with raw holding 2C channels; the first C
      become illumination and the rest a residual for
      :code:`retinex_reconstruct`.
    """

    def __init__(self, cfg):
        super().__init__(cfg)
        self.op = cfg.options['op']
        self.eps = cfg.options.get('eps', RETINEX_EPS)

    @classmethod
    def expected(cls, cfg, in_channels):
        op = cfg.options.get('op')
        if op not in OPS:
            raise ConfigError(f"""op must be one of {OPS}, got {op!r}.""")
        n = len(in_channels)
        if op == 'identity' and n == 1:
            return in_channels[0]
        if op == 'slice' and n == 1:
            start, stop = cfg.options['start'], cfg.options['stop']
            if not 0 <= start < stop <= in_channels[0]:
                raise ConfigError(f"""slice {start}:{stop} out of range.""")
            return stop - start
        if op == 'illumination' and n == 1:
            return in_channels[0]
        if op in ('divide', 'multiply') and n == 2 and in_channels[1] in (1, in_channels[0]):
            return in_channels[0]
        if op == 'retinex' and n == 2 and in_channels[1] == 2 * in_channels[0]:
            return in_channels[0]
        raise ConfigError(f"""op '{op}' cannot take inputs of {in_channels} channels.""")

    @classmethod
    def check(cls, cfg, in_channels):
        out = cls.expected(cfg, in_channels)
        if out != cfg.out_channels:
            raise ConfigError(f"""op '{cfg.options['op']}' yields {out} channels,"""
                              f""" config says {cfg.out_channels}.""")

    def forward(self, x, other=None):
        if self.op == 'identity':
            return x
        if self.op == 'slice':
            return x[:, self.cfg.options['start']:self.cfg.options['stop']]
        if self.op == 'illumination':
            return to_illumination(x, self.eps)
        if self.op == 'divide':
            return x / other.clamp(min=self.eps)
        if self.op == 'multiply':
            return x * other
        c = x.shape[1]
        return retinex_reconstruct(x, to_illumination(other[:, :c], self.eps),
                                   other[:, c:], self.eps)


@block_kind('preprocess')
class PreprocessBlock(_BlockBase):
    """Frozen [raw, slot1, slot2] stack; settings come from
    :code:`cfg.options` as Preprocessor keyword arguments."""

    def __init__(self, cfg):
        super().__init__(cfg)
        self.preprocessor = Preprocessor(**cfg.options)

    @classmethod
    def check(cls, cfg, in_channels):
        if list(in_channels) != [3] or cfg.out_channels != Preprocessor.out_channels:
            raise ConfigError("""preprocess maps 3 channels to 9.""")

    @classmethod
    def global_context(cls, cfg):
        return Preprocessor(**cfg.options).global_context

    def forward(self, x):
        return self.preprocessor(x)
