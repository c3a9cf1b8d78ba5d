""" Frozen preprocessor slots that expand an RGB image into the 9-channel
stack [raw, slot1, slot2]."""

# License: BSD 3 clause

import torch

from ellie.classical.histogram import (HistogramSpec, equalize_image, clahe_image,
                                       lowres_equalize_image)
from ellie.colorspace._checks import check_channels, check_positive
from ellie.decorators import short_name, lookup
from ellie.errors import ConfigError

PREPROCESSORS = {}

# slots whose output depends on image-wide statistics
_GLOBAL_SLOTS = ('clahe', 'he', 'lowres_he')


@short_name('identity', PREPROCESSORS)
def identity_slot(img, prep):
    return img


@short_name('clahe', PREPROCESSORS)
def clahe_slot(img, prep):
    return clahe_image(img, prep.histogram_spec, prep.mode)


@short_name('he', PREPROCESSORS)
def he_slot(img, prep):
    return equalize_image(img, prep.histogram_spec, prep.mode)


@short_name('lowres_he', PREPROCESSORS)
def lowres_he_slot(img, prep):
    return lowres_equalize_image(img, prep.histogram_spec, prep.mode, prep.he_scale)


@short_name('gamma', PREPROCESSORS)
def gamma_slot(img, prep):
    return img.clamp(0.0, 1.0).pow(prep.gamma)


class Preprocessor:
    """Two configurable non-learned preprocessors whose outputs are stacked
    after the raw image.

    Parameters
    ----------
    slot1: str, default: 'identity'
        Name of the first preprocessor. Its output also feeds the global
        residual of models built on this stack.
    slot2: str, default: 'clahe'
        Name of the second preprocessor.
    mode: str, default: 'luma'
        Color handling of histogram slots: 'luma' or 'per_channel'.
    clip_limit: float, default: 2.0
        CLAHE clip limit.
    tile_grid: tuple of int, default: (8, 8)
        CLAHE tile grid.
    bins: int, default: 256
        Histogram bins.
    he_scale: float, default: 0.25
        Downscale factor of the 'lowres_he' slot.
    gamma: float, default: 0.5
        Exponent of the 'gamma' slot.
    """

    out_channels = 9

    def __init__(self, slot1='identity', slot2='clahe', mode='luma', clip_limit=2.0,
                 tile_grid=(8, 8), bins=256, he_scale=0.25, gamma=0.5):
        self.slot1 = slot1
        self.slot2 = slot2
        self._slots = [lookup(PREPROCESSORS, slot1, 'preprocessor'),
                       lookup(PREPROCESSORS, slot2, 'preprocessor')]

        if mode not in ('luma', 'per_channel'):
            raise ConfigError(f"""mode must be 'luma' or 'per_channel', got {mode!r}.""")
        if not 0 < he_scale <= 1:
            raise ConfigError("""he_scale must be in (0, 1].""")
        try:
            check_positive(gamma, 'gamma')
        except ValueError as e:
            raise ConfigError(str(e)) from e

        self.mode = mode
        self.he_scale = he_scale
        self.gamma = gamma
        self.histogram_spec = HistogramSpec(bins, clip_limit, tuple(tile_grid))

    @property
    def global_context(self):
        return self.slot1 in _GLOBAL_SLOTS or self.slot2 in _GLOBAL_SLOTS

    def to_dict(self):
        return {'slot1': self.slot1, 'slot2': self.slot2, 'mode': self.mode,
                'clip_limit': self.histogram_spec.clip_limit,
                'tile_grid': list(self.histogram_spec.tile_grid),
                'bins': self.histogram_spec.bins,
                'he_scale': self.he_scale, 'gamma': self.gamma}

    def __call__(self, img):
        check_channels(img, 3)
        with torch.no_grad():
            first, second = (slot(img, self) for slot in self._slots)
        return torch.cat([img, first, second], dim=-3)

    def __repr__(self):
        return f'Preprocessor({self.slot1}, {self.slot2})'
