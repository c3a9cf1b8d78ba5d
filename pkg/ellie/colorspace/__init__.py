""" Invertible color decompositions separating luminance from chrominance."""

# License: BSD 3 clause

from .grayscale import rgb_to_grayscale, luminance_scalar, LUMA_WEIGHTS
from .yuv import rgb_to_yuv, yuv_to_rgb
from .lab import rgb_to_lab, lab_to_rgb
from .hvi import HviImage, HviTransform, intensity_collapse, rgb_to_hvi, hvi_to_rgb
from .exposures import make_virtual_exposures, DEFAULT_GAMMAS
