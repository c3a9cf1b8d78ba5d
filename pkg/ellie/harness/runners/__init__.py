""" Classes for running and recording training experiments."""

# License: BSD 3 clause

from .train_runner import TrainRunner
from .utils import build_data_filename
