""" Classes and functions for global and contrast-limited adaptive histogram
equalization."""

# License: BSD 3 clause

import math
from dataclasses import dataclass

import numpy as np
import torch
from scipy import ndimage

from ellie.colorspace import rgb_to_grayscale
from ellie.colorspace._checks import check_channels
from ellie.errors import ConfigError, ShapeError


@dataclass
class HistogramSpec:
    """Histogram settings shared by HE and CLAHE.

    Parameters
    ----------
    bins: int, default: 256
        Number of histogram bins. Must be at least 2.
    clip_limit: float, default: 2.0
        CLAHE clip level as a multiple of the mean bin count. Must be
        greater than 0; :code:`float('inf')` disables clipping.
    tile_grid: tuple of int, default: (8, 8)
        CLAHE tile rows and columns. Each must be at least 1.
    """
    bins: int = 256
    clip_limit: float = 2.0
    tile_grid: tuple = (8, 8)

    def __post_init__(self):
        if int(self.bins) != self.bins or self.bins < 2:
            raise ConfigError("""bins must be an integer of at least 2.""")
        self.bins = int(self.bins)

        if not self.clip_limit > 0:
            raise ConfigError("""clip_limit must be greater than 0.""")

        if len(self.tile_grid) != 2 or min(self.tile_grid) < 1:
            raise ConfigError("""tile_grid must be two counts of at least 1.""")
        self.tile_grid = tuple(int(t) for t in self.tile_grid)


def _bin_index(values, bins):
    return np.minimum((np.clip(values, 0.0, 1.0) * bins).astype(np.int64), bins - 1)


def _cdf(index, bins):
    hist = np.bincount(index.ravel(), minlength=bins).astype(np.float64)
    return np.cumsum(hist) / index.size


def _apply_per_image(channel, fn):
    """Run a (H, W) -> (H, W) numpy function over every image in a
    1-channel array or tensor of shape (H, W) or (..., 1, H, W)."""
    is_tensor = torch.is_tensor(channel)
    values = channel.detach().cpu().numpy() if is_tensor else np.asarray(channel)

    if values.ndim == 2 and not is_tensor:
        return fn(values.astype(np.float64)).astype(values.dtype, copy=False)

    if values.ndim < 3 or values.shape[-3] != 1:
        raise ShapeError(f"""channel must have shape (..., 1, H, W),"""
                         f""" got {values.shape}.""")

    flat = values.reshape((-1,) + values.shape[-2:]).astype(np.float64)
    out = np.stack([fn(v) for v in flat]).reshape(values.shape)

    if is_tensor:
        return torch.from_numpy(out).to(dtype=channel.dtype, device=channel.device)
    return out.astype(values.dtype, copy=False)


def _equalize(values, bins):
    if values.max() == values.min():
        return values
    index = _bin_index(values, bins)
    return _cdf(index, bins)[index]


def histogram_equalize(channel, spec=None):
    """Map each intensity through the image's cumulative histogram.

    Parameters
    ----------
    channel: array or tensor
        Single-channel image, shape (H, W) or (..., 1, H, W), values in
        [0, 1]. Leading dimensions are equalized independently.
    spec: HistogramSpec, default: None
        Bin count to use. Defaults to :code:`HistogramSpec()`.

    Returns
    -------
    equalized: array or tensor
        Same type and shape as :code:`channel`. A constant image is
        returned unchanged.

    Example
    -------
    .. highlight:: python
    .. code-block:: python

        >>> import numpy as np
        >>> import ellie
        >>> img = np.array([[0.1, 0.9], [0.9, 0.9]])
        >>> ellie.histogram_equalize(img)
        array([[0.25, 1.  ],
               [1.  , 1.  ]])
    """
    spec = spec or HistogramSpec()
    return _apply_per_image(channel, lambda v: _equalize(v, spec.bins))


def _tile_edges(size, count):
    return np.floor(np.linspace(0, size, count + 1)).astype(np.int64)


def _clipped_cdf(index, bins, clip_limit):
    hist = np.bincount(index.ravel(), minlength=bins).astype(np.float64)
    if math.isfinite(clip_limit):
        limit = clip_limit * index.size / bins
        excess = np.clip(hist - limit, 0.0, None).sum()
        hist = np.minimum(hist, limit) + excess / bins
    return np.cumsum(hist) / index.size


def _interp_axis(size, edges):
    """Fractional tile coordinate of every pixel along one axis, clamped to
    the outermost tile centres. A tile [a, b) is centred at (a + b) / 2,
    the convention of :code:`cv2.createCLAHE`."""
    centres = (edges[:-1] + edges[1:]) / 2.0
    position = np.interp(np.arange(size), centres, np.arange(len(centres)))
    lower = np.floor(position).astype(np.int64)
    upper = np.minimum(lower + 1, len(centres) - 1)
    return lower, upper, position - lower


def _clahe(values, spec):
    rows, cols = spec.tile_grid
    height, width = values.shape
    if rows > height or cols > width:
        raise ConfigError(f"""tile_grid {spec.tile_grid} is larger than the"""
                          f""" image ({height}x{width}).""")
    if values.max() == values.min():
        return values

    index = _bin_index(values, spec.bins)
    ys, xs = _tile_edges(height, rows), _tile_edges(width, cols)

    luts = np.empty((rows, cols, spec.bins))
    for i in range(rows):
        for j in range(cols):
            tile = index[ys[i]:ys[i + 1], xs[j]:xs[j + 1]]
            luts[i, j] = _clipped_cdf(tile, spec.bins, spec.clip_limit)

    i0, i1, wy = _interp_axis(height, ys)
    j0, j1, wx = _interp_axis(width, xs)
    i0, i1, wy = i0[:, None], i1[:, None], wy[:, None]
    j0, j1, wx = j0[None, :], j1[None, :], wx[None, :]

    return ((1 - wy) * (1 - wx) * luts[i0, j0, index]
            + (1 - wy) * wx * luts[i0, j1, index]
            + wy * (1 - wx) * luts[i1, j0, index]
            + wy * wx * luts[i1, j1, index])


def clahe(channel, spec=None):
    """Contrast-limited adaptive histogram equalization.

    Each tile's histogram is clipped at :code:`clip_limit` times the mean
    bin count and the clipped excess is spread evenly over all bins in a
    single pass. Every pixel is then mapped through the four surrounding
    tile mappings and bilinearly interpolated between tile centres.

    Tile centres and the clip level follow :code:`cv2.createCLAHE`. That
    function only takes 8 or 16 bit images with one bin per code value,
    so this works in numpy on float images with any bin count and spreads
    the excess as a fraction rather than in whole counts.

    Parameters
    ----------
    channel: array or tensor
        Single-channel image, shape (H, W) or (..., 1, H, W), values in
        [0, 1].
    spec: HistogramSpec, default: None
        Bins, clip limit and tile grid. Defaults to :code:`HistogramSpec()`.

    Returns
    -------
    equalized: array or tensor
        Same type and shape as :code:`channel`, values in [0, 1].
    """
    spec = spec or HistogramSpec()
    return _apply_per_image(channel, lambda v: _clahe(v, spec))


def lowres_histogram_equalize(channel, spec=None, scale=0.25):
    """Histogram equalization whose mapping is estimated on a downscaled
    copy and applied at full resolution.

    Parameters
    ----------
    channel: array or tensor
        Single-channel image, shape (H, W) or (..., 1, H, W).
    spec: HistogramSpec, default: None
        Bin count to use.
    scale: float, default: 0.25
        Downscale factor for the estimate. Must be in (0, 1].
    """
    spec = spec or HistogramSpec()
    if not 0 < scale <= 1:
        raise ConfigError("""scale must be in (0, 1].""")

    def equalize(values):
        if values.max() == values.min():
            return values
        small = ndimage.zoom(values, scale, order=1) if scale < 1 else values
        if small.size == 0:
            small = values
        index = _bin_index(values, spec.bins)
        return _cdf(_bin_index(small, spec.bins), spec.bins)[index]

    return _apply_per_image(channel, equalize)


def _apply_color(img, fn, mode):
    check_channels(img, 3)
    if mode == 'per_channel':
        return torch.cat([fn(img[..., c:c + 1, :, :]) for c in range(3)], dim=-3)
    if mode != 'luma':
        raise ConfigError(f"""mode must be 'luma' or 'per_channel', got {mode!r}.""")

    luma = rgb_to_grayscale(img).clamp(0.0, 1.0)
    mapped = fn(luma)
    lit = luma > 1e-6
    ratio = mapped / torch.where(lit, luma, torch.ones_like(luma))
    return torch.where(lit, img * ratio, mapped.expand_as(img)).clamp(0.0, 1.0)


def equalize_image(img, spec=None, mode='luma'):
    """Histogram-equalize an RGB tensor of shape (..., 3, H, W).

    :code:`mode='luma'` equalizes the grayscale channel and rescales RGB by
    the luma ratio; :code:`mode='per_channel'` equalizes R, G and B
    separately.
    """
    return _apply_color(img, lambda c: histogram_equalize(c, spec), mode)


def clahe_image(img, spec=None, mode='luma'):
    """CLAHE on an RGB tensor; see :code:`equalize_image` for modes."""
    return _apply_color(img, lambda c: clahe(c, spec), mode)


def lowres_equalize_image(img, spec=None, mode='luma', scale=0.25):
    """Low-resolution HE on an RGB tensor; see :code:`equalize_image`."""
    return _apply_color(img, lambda c: lowres_histogram_equalize(c, spec, scale), mode)
