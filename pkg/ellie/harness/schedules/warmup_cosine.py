""" Linear warmup followed by cosine decay of the step size."""

# License: BSD 3 clause

import math

from ellie.decorators import short_name
from ellie.errors import ConfigError
from ellie.harness.schedules._registry import SCHEDULES


@short_name('warmup_cosine', SCHEDULES)
class WarmupCosineSchedule:
    """
    Schedule rising linearly from 0 to a peak step size, then following a
    half cosine down to a floor:

    .. math::

        lr(t) = \\begin{cases}
            lr_{max} \\, t / W & t < W \\\\
            lr_{min} + \\frac{1}{2}(lr_{max} - lr_{min})
            (1 + \\cos(\\pi \\frac{t - W}{T - W})) & W \\leq t < T \\\\
            lr_{min} & t \\geq T
        \\end{cases}

    Parameters
    ----------
    peak_lr: float, default: 2e-4
        Step size at the end of warmup. Must be greater than 0.
    total_steps: int, default: 1000
        Step at which the floor is reached. Must exceed warmup_steps.
    warmup_steps: int, default: 50
        Length of the linear warmup.
    min_lr: float, default: 1e-6
        Floor. Must be between 0 and peak_lr.

    Example
    -------
    .. highlight:: python
    .. code-block:: python

        >>> import ellie
        >>> schedule = ellie.WarmupCosineSchedule(peak_lr=1.0, total_steps=110,
        ...                                       warmup_steps=10, min_lr=0.0)
        >>> schedule.evaluate(5), schedule.evaluate(10), schedule.evaluate(60)
        (0.5, 1.0, 0.5)
    """

    def __init__(self, peak_lr=2e-4, total_steps=1000, warmup_steps=50, min_lr=1e-6):
        self.peak_lr = peak_lr
        self.total_steps = total_steps
        self.warmup_steps = warmup_steps
        self.min_lr = min_lr

        if self.peak_lr <= 0:
            raise ConfigError("""peak_lr must be greater than 0.""")
        if self.warmup_steps < 0:
            raise ConfigError("""warmup_steps must be at least 0.""")
        if self.total_steps <= self.warmup_steps:
            raise ConfigError("""total_steps must be greater than warmup_steps.""")
        if not 0 <= self.min_lr <= self.peak_lr:
            raise ConfigError("""min_lr must be between 0 and peak_lr.""")

    def evaluate(self, t):
        """Evaluate the step size at step t.

        Parameters
        ----------
        t: int
            Training step.

        Returns
        -------
        lr: float
            Step size at step t.
        """
        if t < self.warmup_steps:
            return self.peak_lr * t / self.warmup_steps
        if t >= self.total_steps:
            return self.min_lr
        progress = (t - self.warmup_steps) / (self.total_steps - self.warmup_steps)
        cosine = 1 + math.cos(math.pi * progress)
        return self.min_lr + 0.5 * (self.peak_lr - self.min_lr) * cosine

    def get_info__(self, t=None, prefix=''):
        prefix = f'_{prefix}__schedule_' if len(prefix) > 0 else 'schedule_'
        info = {
            f'{prefix}type': 'warmup_cosine',
            f'{prefix}peak_lr': self.peak_lr,
            f'{prefix}total_steps': self.total_steps,
            f'{prefix}warmup_steps': self.warmup_steps,
            f'{prefix}min_lr': self.min_lr,
        }
        if t is not None:
            info[f'{prefix}current_value'] = self.evaluate(t)
        return info

    def __str__(self):
        return str(self.peak_lr)

    def __repr__(self):
        return f'{self.__class__.__name__}(peak_lr={self.peak_lr}, ' \
               f'total_steps={self.total_steps}, warmup_steps={self.warmup_steps}, ' \
               f'min_lr={self.min_lr})'
