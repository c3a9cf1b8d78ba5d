""" Feature-space losses behind a pluggable extractor interface."""

# License: BSD 3 clause

from abc import ABC, abstractmethod

import torch
import torch.nn.functional as F

from ellie.decorators import short_name, lookup
from ellie.errors import BackendError, EllieError
from ellie.losses.pixel import check_pair

FEATURE_BACKENDS = {}
_INSTANCES = {}


class FeatureExtractor(ABC):
    """Maps an image batch to a list of feature maps, coarse levels last.

    Implementations must not change state while extracting features.
    """

    name = 'abstract'

    @abstractmethod
    def features(self, img):
        pass


@short_name('random_pyramid', FEATURE_BACKENDS)
class RandomPyramidBackend(FeatureExtractor):
    """Fixed random-weight convolutional pyramid.

    Each level is a 3x3 convolution with ReLU followed by 2x2 average
    pooling. Weights are drawn once from a seeded generator, so the
    features are deterministic. This is a self-contained stand-in for
    learned perceptual networks.

    Parameters
    ----------
    widths: tuple of int, default: (8, 16, 32)
        Channels per level.
    seed: int, default: 0
        Generator seed.
    """

    name = 'random_pyramid'

    def __init__(self, widths=(8, 16, 32), seed=0):
        generator = torch.Generator().manual_seed(seed)
        self.weights = []
        channels = 3
        for width in widths:
            w = torch.randn(width, channels, 3, 3, generator=generator)
            self.weights.append(w / (channels * 9) ** 0.5)
            channels = width

    def features(self, img):
        feats, x = [], img
        for w in self.weights:
            x = F.relu(F.conv2d(x, w.to(img), padding=1))
            feats.append(x)
            x = F.avg_pool2d(x, 2) if min(x.shape[-2:]) >= 2 else x
        return feats


def register_feature_backend(name, backend):
    """Make a FeatureExtractor instance available to perceptual_loss."""
    FEATURE_BACKENDS[name] = type(backend)
    _INSTANCES[name] = backend


def get_feature_backend(name='random_pyramid'):
    if name not in _INSTANCES:
        _INSTANCES[name] = lookup(FEATURE_BACKENDS, name, 'feature backend')()
    return _INSTANCES[name]


def perceptual_loss(pred, gt, backend='random_pyramid'):
    """Sum over levels of the mean squared feature distance.

    Parameters
    ----------
    pred, gt: tensor
        Images of shape (B, 3, H, W).
    backend: str or FeatureExtractor, default: 'random_pyramid'
        Feature extractor, by registered name or instance.

    Returns
    -------
    loss: tensor
        Non-negative scalar; errors inside the backend are re-raised as
        BackendError naming it.
    """
    check_pair(pred, gt)
    extractor = get_feature_backend(backend) if isinstance(backend, str) else backend
    try:
        fp, fg = extractor.features(pred), extractor.features(gt)
        return sum(((a - b) ** 2).mean() for a, b in zip(fp, fg))
    except EllieError:
        raise
    except Exception as e:
        raise BackendError(getattr(extractor, 'name', type(extractor).__name__), e) from e
