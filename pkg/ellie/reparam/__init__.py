""" Structural reparameterization: fold normalization and merge branches."""

# License: BSD 3 clause

from .branch import (NormStats, ConvBranchSpec, ConvParams, fold_norm, pad_kernel,
                     merge_branches, branch_forward)
from .model import reparameterize_model
