""" Reference sub-megabyte enhancement models, parameter accounting and
budget auditing."""

# License: BSD 3 clause

from .spec import ModelSpec, NodeSpec, COLORSPACE_MODES
from .budget import (ParamBudget, BudgetReport, count_params, audit_budget,
                     node_param_counts, enforce_budget)
from .enhancer import GraphEnhancer
from .builders import (build_norm_unet, build_efficient_hvi, build_mobileie6,
                       build_retinex_lite, build_spec, build_model, MODELS)
from ellie.blocks import retinex_reconstruct
