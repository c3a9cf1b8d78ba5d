""" Piecewise-constant step size decay."""

# License: BSD 3 clause

from ellie.decorators import short_name
from ellie.errors import ConfigError
from ellie.harness.schedules._registry import SCHEDULES


@short_name('multi_step', SCHEDULES)
class MultiStepSchedule:
    """
    Step size multiplied by :code:`gamma` at every milestone:

    .. math::

        lr(t) = lr_{0} \\times \\gamma^{|\\{m \\in M : m \\leq t\\}|}

    Parameters
    ----------
    peak_lr: float, default: 2e-4
        Initial step size. Must be greater than 0.
    milestones: sequence of int, default: ()
        Steps at which the step size decays.
    gamma: float, default: 0.5
        Decay factor. Must be between 0 and 1.

    Example
    -------
    .. highlight:: python
    .. code-block:: python

        >>> import ellie
        >>> schedule = ellie.MultiStepSchedule(peak_lr=1.0, milestones=(10, 20), gamma=0.5)
        >>> schedule.evaluate(25)
        0.25
    """

    def __init__(self, peak_lr=2e-4, milestones=(), gamma=0.5):
        self.peak_lr = peak_lr
        self.milestones = tuple(sorted(milestones))
        self.gamma = gamma

        if self.peak_lr <= 0:
            raise ConfigError("""peak_lr must be greater than 0.""")
        if (self.gamma <= 0) or (self.gamma > 1):
            raise ConfigError("""gamma must be between 0 and 1.""")
        if any(m < 0 for m in self.milestones):
            raise ConfigError("""milestones must be non-negative.""")

    def evaluate(self, t):
        """Evaluate the step size at step t."""
        return self.peak_lr * self.gamma ** sum(m <= t for m in self.milestones)

    def get_info__(self, t=None, prefix=''):
        prefix = f'_{prefix}__schedule_' if len(prefix) > 0 else 'schedule_'
        info = {
            f'{prefix}type': 'multi_step',
            f'{prefix}peak_lr': self.peak_lr,
            f'{prefix}milestones': self.milestones,
            f'{prefix}gamma': self.gamma,
        }
        if t is not None:
            info[f'{prefix}current_value'] = self.evaluate(t)
        return info

    def __str__(self):
        return str(self.peak_lr)

    def __repr__(self):
        return f'{self.__class__.__name__}(peak_lr={self.peak_lr}, ' \
               f'milestones={self.milestones}, gamma={self.gamma})'
