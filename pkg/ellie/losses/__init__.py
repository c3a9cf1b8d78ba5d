""" Loss terms and weighted composites."""

# License: BSD 3 clause

from .pixel import l1_loss, charbonnier_loss, smooth_l1_loss, luma_loss
from .structural import (ssim_loss, ms_ssim_loss, ssim_index, ssim_components, ms_ssim,
                         gaussian_window, C1, C2, MS_SSIM_WEIGHTS)
from .regularizers import (tv_loss, color_constancy_loss, exposure_loss,
                           spatial_consistency_loss)
from .spectral import frequency_loss, gradient_edge_loss, sobel_magnitude
from .perceptual import (FeatureExtractor, RandomPyramidBackend, FEATURE_BACKENDS,
                         register_feature_backend, get_feature_backend, perceptual_loss)
from .composite import (LossTerm, LossConfig, LOSS_TERMS, PRESETS, NO_REFERENCE_TERMS,
                        composite_loss)
