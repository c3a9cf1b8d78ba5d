""" Non-learned enhancement primitives."""

# License: BSD 3 clause

from .histogram import (HistogramSpec, histogram_equalize, clahe,
                        lowres_histogram_equalize, equalize_image, clahe_image,
                        lowres_equalize_image)
from .tone import apply_gamma_map, exposure_fusion
from .preprocess import Preprocessor, PREPROCESSORS
