""" Step size schedules for training."""

# License: BSD 3 clause

from ._registry import SCHEDULES
from .warmup_cosine import WarmupCosineSchedule
from .cosine_restart import CosineRestartSchedule
from .multi_step import MultiStepSchedule
from .custom_schedule import CustomSchedule
