""" User-supplied step size schedule."""

# License: BSD 3 clause

import math

from ellie.decorators import short_name
from ellie.errors import ConfigError
from ellie.harness.schedules._registry import SCHEDULES


@short_name('custom', SCHEDULES)
class CustomSchedule:
    """Class for generating your own step size schedule.

    Parameters
    ----------
    schedule: callable
        Function for calculating the step size at step t with the signature
        :code:`schedule(t, **kwargs)`.

    kwargs: additional arguments
        Additional parameters to be passed to schedule.

    Example
    -------
    .. highlight:: python
    .. code-block:: python

        >>> import ellie
        >>> def halving(t, lr): return lr / 2 ** (t // 100)
        >>> schedule = ellie.CustomSchedule(halving, lr=1e-3)
        >>> schedule.evaluate(250)
        0.00025
    """

    def __init__(self, schedule, **kwargs):
        if not callable(schedule):
            raise ConfigError("""schedule must be callable.""")
        self.schedule = schedule
        self.kwargs = kwargs

    def evaluate(self, t):
        """Evaluate the step size at step t; it must be finite and
        non-negative."""
        lr = float(self.schedule(t, **self.kwargs))
        if not math.isfinite(lr) or lr < 0:
            raise ConfigError(f"""custom schedule gave step size {lr} at step {t}.""")
        return lr

    def get_info__(self, t=None, prefix=''):
        prefix = f'_{prefix}__schedule_' if len(prefix) > 0 else 'schedule_'
        info = {
            f'{prefix}type': 'custom',
            f'{prefix}schedule': getattr(self.schedule, '__name__', str(self.schedule))
        }
        info.update({f'{prefix}_args_{k}': v for k, v in self.kwargs.items()})
        if t is not None:
            info[f'{prefix}current_value'] = self.evaluate(t)
        return info

    def __str__(self):
        return str(self.schedule)

    def __repr__(self):
        return f'{self.__class__.__name__}[{self.__dict__}]'
