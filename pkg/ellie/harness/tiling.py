""" Tiled inference for images larger than memory allows.

In exact mode the image is cut into core regions, each processed with a
margin of :code:`overlap` pixels of context and written back without the
margin. When the overlap covers the model's receptive radius and tile
origins respect its size multiple, the result equals whole-image
inference. Blend mode covers models with global context: overlapping
tiles are averaged with linear feathering weights.
"""

# License: BSD 3 clause

import math

import torch

from ellie.errors import ConfigError, ShapeError

BLEND_OVERLAP = 32


def _round_up(value, multiple):
    return int(math.ceil(value / multiple) * multiple)


def tile_starts(length, tile, stride):
    """Start offsets of windows of size :code:`tile` covering
    :code:`[0, length)` with the given stride; the last window ends at
    :code:`length`."""
    if length <= tile:
        return [0]
    starts = list(range(0, length - tile, stride))
    return starts + [length - tile]


def feather_weights(height, width, overlap, edges=(True, True, True, True)):
    """Linear ramp weights of one tile.

    Parameters
    ----------
    height, width: int
        Tile size.
    overlap: int
        Ramp length in pixels.
    edges: tuple of bool, default: (True, True, True, True)
        Whether the top, bottom, left and right sides border another tile;
        only those sides are ramped.

    Returns
    -------
    weights: tensor
        Shape (height, width), strictly positive, at most 1.
    """
    def ramp(n, lo, hi):
        w = torch.ones(n, dtype=torch.float64)
        if overlap > 0:
            r = (torch.arange(n, dtype=torch.float64) + 1) / (overlap + 1)
            if lo:
                w = torch.minimum(w, r)
            if hi:
                w = torch.minimum(w, r.flip(0))
        return w

    top, bottom, left, right = edges
    return ramp(height, top, bottom)[:, None] * ramp(width, left, right)[None, :]


def blend_layout(height, width, tile, overlap):
    """Tile boxes :code:`(top, left, h, w)` and their normalized feathering
    weights; at every pixel the weights of the covering tiles sum to 1."""
    stride = tile - overlap
    tops, lefts = tile_starts(height, tile, stride), tile_starts(width, tile, stride)
    boxes, weights = [], []
    total = torch.zeros(height, width, dtype=torch.float64)
    for i, top in enumerate(tops):
        for j, left in enumerate(lefts):
            h, w = min(tile, height), min(tile, width)
            edges = (i > 0, i < len(tops) - 1, j > 0, j < len(lefts) - 1)
            wt = feather_weights(h, w, overlap, edges)
            boxes.append((top, left, h, w))
            weights.append(wt)
            total[top:top + h, left:left + w] += wt
    return boxes, [wt / total[t:t + h, l:l + w] for wt, (t, l, h, w) in zip(weights, boxes)]


def exact_layout(length, tile, overlap):
    """(core_start, core_stop, tile_start, tile_stop) along one axis."""
    core = tile - 2 * overlap
    spans = []
    for start in range(0, length, core):
        stop = min(start + core, length)
        spans.append((start, stop, max(0, start - overlap), min(length, stop + overlap)))
    return spans


def resolve_mode(model, tile, overlap=None, mode='auto'):
    """Pick the tiling mode and overlap for :code:`model`.

    Returns
    -------
    mode, overlap: str, int
        'exact' with an overlap rounded up to the model's size multiple, or
        'blend'.
    """
    radius = getattr(model, 'receptive_radius', None)
    multiple = getattr(model, 'size_multiple', 1)
    if mode not in ('auto', 'exact', 'blend'):
        raise ConfigError(f"""unknown tiling mode '{mode}'.""")
    if mode == 'exact' and radius is None:
        raise ConfigError("""exact tiling needs a model without global context.""")
    if mode == 'auto':
        exact = radius is not None and (overlap is None or overlap >= radius)
        mode = 'exact' if exact else 'blend'
    if overlap is None:
        overlap = radius if mode == 'exact' else BLEND_OVERLAP
    if mode == 'exact':
        if overlap < radius:
            raise ConfigError(f"""overlap {overlap} is below the receptive radius {radius}.""")
        overlap = _round_up(overlap, multiple)
    if tile <= 2 * overlap:
        raise ConfigError(f"""tile {tile} must exceed twice the overlap {overlap}.""")
    if mode == 'exact' and (tile - 2 * overlap) // multiple < 1:
        raise ConfigError(f"""tile {tile} leaves no core at size multiple {multiple}.""")
    return mode, overlap


def tiled_inference(model, img, tile=512, overlap=None, mode='auto'):
    """Enhance :code:`img` tile by tile.

    Parameters
    ----------
    model: GraphEnhancer
        Model exposing :code:`receptive_radius` and :code:`size_multiple`;
        it is run in eval mode without gradients.
    img: tensor
        Image of shape (3, H, W) or (B, 3, H, W).
    tile: int, default: 512
        Tile side.
    overlap: int, default: None
        Context margin (exact) or overlap width (blend).
    mode: str, default: 'auto'
        'exact', 'blend' or 'auto' (exact whenever the model allows it).

    Returns
    -------
    out: tensor
        Same shape as :code:`img`.
    """
    single = img.dim() == 3
    x = img.unsqueeze(0) if single else img
    if x.dim() != 4:
        raise ShapeError(f"""expected a (3, H, W) or (B, 3, H, W) image, got {tuple(img.shape)}.""")
    mode, overlap = resolve_mode(model, tile, overlap, mode)
    height, width = x.shape[-2:]

    was_training = model.training
    model.eval()
    try:
        with torch.no_grad():
            if height <= tile and width <= tile:
                out = model(x)
            elif mode == 'exact':
                out = _run_exact(model, x, tile, overlap)
            else:
                out = _run_blend(model, x, tile, overlap)
    finally:
        model.train(was_training)
    return out[0] if single else out


def _run_exact(model, x, tile, overlap):
    multiple = getattr(model, 'size_multiple', 1)
    core_tile = overlap * 2 + ((tile - 2 * overlap) // multiple) * multiple
    out = torch.empty_like(x)
    for cy0, cy1, ty0, ty1 in exact_layout(x.shape[-2], core_tile, overlap):
        for cx0, cx1, tx0, tx1 in exact_layout(x.shape[-1], core_tile, overlap):
            y = model(x[..., ty0:ty1, tx0:tx1])
            out[..., cy0:cy1, cx0:cx1] = y[..., cy0 - ty0:cy1 - ty0, cx0 - tx0:cx1 - tx0]
    return out


def _run_blend(model, x, tile, overlap):
    boxes, weights = blend_layout(x.shape[-2], x.shape[-1], tile, overlap)
    out = torch.zeros_like(x)
    for (top, left, h, w), wt in zip(boxes, weights):
        y = model(x[..., top:top + h, left:left + w])
        out[..., top:top + h, left:left + w] += y * wt.to(y)
    return out
