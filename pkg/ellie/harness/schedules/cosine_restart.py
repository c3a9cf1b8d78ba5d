""" Cosine annealing with warm restarts."""

# License: BSD 3 clause

import math

from ellie.decorators import short_name
from ellie.errors import ConfigError
from ellie.harness.schedules._registry import SCHEDULES


@short_name('cosine_restart', SCHEDULES)
class CosineRestartSchedule:
    """
    Cosine decay from :code:`peak_lr` to :code:`min_lr` that restarts at
    the peak every cycle. The first cycle lasts :code:`period` steps and
    each following cycle is :code:`period_mult` times longer.

    Parameters
    ----------
    peak_lr: float, default: 2e-4
        Step size at the start of every cycle. Must be greater than 0.
    period: int, default: 250
        Length of the first cycle. Must be at least 1.
    min_lr: float, default: 1e-6
        Step size at the end of every cycle.
    period_mult: int, default: 1
        Growth factor of the cycle length. Must be at least 1.
    """

    def __init__(self, peak_lr=2e-4, period=250, min_lr=1e-6, period_mult=1):
        self.peak_lr = peak_lr
        self.period = period
        self.min_lr = min_lr
        self.period_mult = period_mult

        if self.peak_lr <= 0:
            raise ConfigError("""peak_lr must be greater than 0.""")
        if self.period < 1:
            raise ConfigError("""period must be at least 1.""")
        if self.period_mult < 1:
            raise ConfigError("""period_mult must be at least 1.""")
        if not 0 <= self.min_lr <= self.peak_lr:
            raise ConfigError("""min_lr must be between 0 and peak_lr.""")

    def _position(self, t):
        length, start = self.period, 0
        while t >= start + length:
            start += length
            length *= self.period_mult
        return t - start, length

    def evaluate(self, t):
        """Evaluate the step size at step t."""
        offset, length = self._position(t)
        cosine = 1 + math.cos(math.pi * offset / length)
        return self.min_lr + 0.5 * (self.peak_lr - self.min_lr) * cosine

    def get_info__(self, t=None, prefix=''):
        prefix = f'_{prefix}__schedule_' if len(prefix) > 0 else 'schedule_'
        info = {
            f'{prefix}type': 'cosine_restart',
            f'{prefix}peak_lr': self.peak_lr,
            f'{prefix}period': self.period,
            f'{prefix}min_lr': self.min_lr,
            f'{prefix}period_mult': self.period_mult,
        }
        if t is not None:
            info[f'{prefix}current_value'] = self.evaluate(t)
        return info

    def __str__(self):
        return str(self.peak_lr)

    def __repr__(self):
        return f'{self.__class__.__name__}(peak_lr={self.peak_lr}, period={self.period}, ' \
               f'min_lr={self.min_lr}, period_mult={self.period_mult})'
