""" Classes for named, weighted combinations of loss terms."""

# License: BSD 3 clause

from dataclasses import dataclass, field

import torch

from ellie.decorators import lookup
from ellie.errors import ConfigError
from ellie.losses.perceptual import perceptual_loss
from ellie.losses.pixel import l1_loss, charbonnier_loss, smooth_l1_loss, luma_loss
from ellie.losses.regularizers import (tv_loss, color_constancy_loss, exposure_loss,
                                       spatial_consistency_loss)
from ellie.losses.spectral import frequency_loss, gradient_edge_loss
from ellie.losses.structural import ssim_loss, ms_ssim_loss

LOSS_TERMS = {
    'l1': l1_loss,
    'charbonnier': charbonnier_loss,
    'smooth_l1': smooth_l1_loss,
    'luma': luma_loss,
    'ssim': ssim_loss,
    'ms_ssim': ms_ssim_loss,
    'tv': lambda pred, gt, **kw: tv_loss(pred, **kw),
    'color': color_constancy_loss,
    'exposure': exposure_loss,
    'spatial': spatial_consistency_loss,
    'frequency': frequency_loss,
    'edge': gradient_edge_loss,
    'perceptual': perceptual_loss,
}

# terms computed from the prediction alone
NO_REFERENCE_TERMS = ('tv', 'color', 'exposure')


@dataclass
class LossTerm:
    """One weighted term.

    Parameters
    ----------
    name: str
        Key into LOSS_TERMS.
    weight: float, default: 1.0
        Non-negative weight.
    params: dict, default: {}
        Keyword arguments of the term.
    ramp_steps: int, default: 0
        When positive, the weight grows linearly from 0 to :code:`weight`
        over this many training steps.
    """
    name: str
    weight: float = 1.0
    params: dict = field(default_factory=dict)
    ramp_steps: int = 0

    def __post_init__(self):
        lookup(LOSS_TERMS, self.name, 'loss term')
        if not self.weight >= 0:
            raise ConfigError(f"""weight of '{self.name}' must be at least 0.""")
        if self.ramp_steps < 0:
            raise ConfigError("""ramp_steps must be at least 0.""")

    def weight_at(self, step=None):
        if step is None or self.ramp_steps == 0:
            return self.weight
        return self.weight * min(1.0, step / self.ramp_steps)

    def evaluate(self, pred, gt):
        return LOSS_TERMS[self.name](pred, gt, **self.params)


PRESETS = {
    's3': [LossTerm('l1', 0.1), LossTerm('perceptual', 1.0)],
    'kletech': [LossTerm('ssim', 0.75), LossTerm('l1', 0.20), LossTerm('edge', 0.05)],
    'sun': [LossTerm('l1'), LossTerm('ssim'), LossTerm('perceptual', ramp_steps=1000),
            LossTerm('color', 0.03), LossTerm('luma', 0.15), LossTerm('edge', 0.05)],
    'hit': [LossTerm('charbonnier'), LossTerm('ssim'), LossTerm('color'),
            LossTerm('frequency')],
    'sysu_701': [LossTerm('charbonnier'), LossTerm('ms_ssim'), LossTerm('color'),
                 LossTerm('frequency')],
    'fvl': [LossTerm('l1'), LossTerm('ssim', 0.2), LossTerm('perceptual', 0.04)],
}


@dataclass
class LossConfig:
    """List of weighted terms, built directly or from a named preset.

    Parameters
    ----------
    terms: list of LossTerm
        At least one term; names must be unique.
    preset: str, default: None
        Preset the terms came from, for reports.

    Example
    -------
    .. highlight:: python
    .. code-block:: python

        >>> import ellie
        >>> cfg = ellie.LossConfig.from_preset('kletech')
        >>> [(t.name, t.weight) for t in cfg.terms]
        [('ssim', 0.75), ('l1', 0.2), ('edge', 0.05)]
    """
    terms: list
    preset: str = None

    def __post_init__(self):
        self.terms = [t if isinstance(t, LossTerm) else LossTerm(*t) for t in self.terms]
        if not self.terms:
            raise ConfigError("""a loss config needs at least one term.""")
        names = [t.name for t in self.terms]
        if len(set(names)) != len(names):
            raise ConfigError(f"""duplicate loss terms in {names}.""")

    @classmethod
    def from_preset(cls, name):
        terms = lookup(PRESETS, name, 'loss preset')
        return cls([LossTerm(t.name, t.weight, dict(t.params), t.ramp_steps) for t in terms],
                   preset=name)

    def to_dict(self):
        return {'preset': self.preset,
                'terms': [[t.name, t.weight, t.params, t.ramp_steps] for t in self.terms]}


def composite_loss(cfg, pred, gt, step=None):
    """Weighted sum of the configured terms.

    Parameters
    ----------
    cfg: LossConfig
        Terms and weights.
    pred, gt: tensor
        Prediction and reference.
    step: int, default: None
        Training step for ramped weights; None uses full weights.

    Returns
    -------
    total: tensor
        Scalar loss.
    breakdown: dict
        Unweighted value of every term, as floats.
    """
    total = torch.zeros((), dtype=pred.dtype, device=pred.device)
    breakdown = {}
    for term in cfg.terms:
        value = term.evaluate(pred, gt)
        breakdown[term.name] = float(value.detach())
        total = total + term.weight_at(step) * value
    return total, breakdown
