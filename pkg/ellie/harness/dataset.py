""" Paired low-light datasets: ingestion, splitting, loading and patch
sampling."""

# License: BSD 3 clause

import os
import warnings
from dataclasses import dataclass, field

import numpy as np
import torch
from joblib import Parallel, delayed
from PIL import Image
from sklearn.model_selection import KFold, train_test_split

from ellie.errors import ConfigError, DataError
from ellie.imageio import read_image, write_image, list_images

INPUT_DIR = 'input'
GT_DIR = 'gt'


@dataclass
class DatasetManifest:
    """Ordered list of (input_path, gt_path) pairs.

    Parameters
    ----------
    pairs: list of (str, str)
        Low-light image and reference paths.
    root: str, default: None
        Dataset root the pairs were read from.
    skipped: list of str, default: []
        Stems left out during ingestion, with the reason.
    """
    pairs: list
    root: str = None
    skipped: list = field(default_factory=list)

    def __len__(self):
        return len(self.pairs)

    def _subset(self, indices):
        return DatasetManifest([self.pairs[i] for i in sorted(indices)], self.root)

    def split(self, val_fraction=0.1, seed=0):
        """Random train / validation split.

        Returns
        -------
        train, val: DatasetManifest
            :code:`val` is empty when :code:`val_fraction` is 0.
        """
        if not 0 <= val_fraction < 1:
            raise ConfigError("""val_fraction must be in [0, 1).""")
        indices = list(range(len(self.pairs)))
        if val_fraction == 0 or len(indices) < 2:
            return self._subset(indices), self._subset([])
        train, val = train_test_split(indices, test_size=val_fraction, random_state=seed)
        return self._subset(train), self._subset(val)

    def folds(self, k=5, seed=0):
        """:code:`k` shuffled (train, val) partitions for cross-validation."""
        if not 2 <= k <= len(self.pairs):
            raise ConfigError(f"""need 2 <= k <= {len(self.pairs)} folds, got {k}.""")
        splitter = KFold(n_splits=k, shuffle=True, random_state=seed)
        return [(self._subset(tr), self._subset(va))
                for tr, va in splitter.split(np.arange(len(self.pairs)))]

    def load(self, n_jobs=1):
        """Decode every pair into (input, gt) tensors of shape (3, H, W)."""
        return Parallel(n_jobs=n_jobs)(
            delayed(_load_pair)(inp, gt) for inp, gt in self.pairs)


def _load_pair(input_path, gt_path):
    return read_image(input_path), read_image(gt_path)


def _image_size(path):
    try:
        with Image.open(path) as im:
            return im.size
    except OSError as e:
        raise DataError(f"""cannot decode image '{path}': {e}""") from e


def ingest_dataset(root_dir):
    """Pair images under :code:`root/input` and :code:`root/gt` by file stem.

    Parameters
    ----------
    root_dir: str
        Dataset root.

    Returns
    -------
    manifest: DatasetManifest
        Pairs in lexicographic stem order. Orphan files and pairs whose
        sizes differ are skipped with a warning.
    """
    input_dir, gt_dir = os.path.join(root_dir, INPUT_DIR), os.path.join(root_dir, GT_DIR)
    if not (os.path.isdir(input_dir) and os.path.isdir(gt_dir)):
        raise DataError(f"""'{root_dir}' needs '{INPUT_DIR}' and '{GT_DIR}' directories.""")

    inputs = {os.path.splitext(f)[0]: f for f in list_images(input_dir)}
    gts = {os.path.splitext(f)[0]: f for f in list_images(gt_dir)}
    skipped = [f'{s}: no reference' for s in sorted(set(inputs) - set(gts))]
    skipped += [f'{s}: no input' for s in sorted(set(gts) - set(inputs))]

    pairs = []
    for stem in sorted(set(inputs) & set(gts)):
        inp, gt = os.path.join(input_dir, inputs[stem]), os.path.join(gt_dir, gts[stem])
        if _image_size(inp) != _image_size(gt):
            skipped.append(f'{stem}: size mismatch {_image_size(inp)} vs {_image_size(gt)}')
            continue
        pairs.append((inp, gt))

    for reason in skipped:
        warnings.warn(f'skipping {reason}')
    if not pairs:
        raise DataError(f"""no usable image pairs under '{root_dir}'.""")
    return DatasetManifest(pairs, root_dir, skipped)


def random_patches(images, batch, patch, generator, crop=True, flip=True, rotate=False):
    """Draw a batch of aligned (input, gt) crops.

    Parameters
    ----------
    images: list of (tensor, tensor)
        Decoded pairs of shape (3, H, W).
    batch: int
        Number of crops.
    patch: int
        Crop side; must not exceed any image side.
    generator: torch.Generator
        Source of every random choice.
    crop: bool, default: True
        Random crop positions; centre crops otherwise.
    flip, rotate: bool
        Random flips and 90 degree rotations, applied to both images.

    Returns
    -------
    low, gt: tensors
        Shape (batch, 3, patch, patch).
    """
    lows, gts = [], []
    for _ in range(batch):
        idx = int(torch.randint(len(images), (1,), generator=generator))
        low, gt = images[idx]
        h, w = low.shape[-2:]
        if patch > min(h, w):
            raise ConfigError(f"""patch {patch} exceeds image size {h}x{w}.""")
        if crop:
            top = int(torch.randint(h - patch + 1, (1,), generator=generator))
            left = int(torch.randint(w - patch + 1, (1,), generator=generator))
        else:
            top, left = (h - patch) // 2, (w - patch) // 2
        pair = torch.stack([low, gt])[..., top:top + patch, left:left + patch]
        if flip:
            draws = torch.rand(2, generator=generator)
            dims = [d for d, draw in zip((-1, -2), draws) if draw < 0.5]
            if dims:
                pair = pair.flip(dims)
        if rotate:
            pair = torch.rot90(pair, int(torch.randint(4, (1,), generator=generator)), (-2, -1))
        lows.append(pair[0])
        gts.append(pair[1])
    return torch.stack(lows), torch.stack(gts)


def synthesize_low_light(img, gamma=2.5, gain=0.5, noise=0.02, generator=None):
    """Darken a normal-light image: :code:`gain * img ** gamma` plus
    Gaussian noise, clipped to [0, 1]."""
    dark = gain * img.clamp(0.0, 1.0).pow(gamma)
    if noise:
        dark = dark + noise * torch.randn(dark.shape, generator=generator)
    return dark.clamp(0.0, 1.0)


def make_synthetic_pairs(count=8, size=128, seed=0, gamma=2.5, gain=0.5, noise=0.02):
    """Smooth random scenes and their synthetic low-light versions.

    Each reference is a sum of random low-frequency sinusoids per channel.

    Returns
    -------
    pairs: list of (tensor, tensor)
        (low, gt) images of shape (3, size, size).
    """
    generator = torch.Generator().manual_seed(seed)
    ys, xs = torch.meshgrid(torch.linspace(0, 1, size), torch.linspace(0, 1, size), indexing='ij')
    pairs = []
    for _ in range(count):
        freq = 1 + 3 * torch.rand(3, 2, 2, generator=generator)
        phase = 2 * np.pi * torch.rand(3, 2, generator=generator)
        base = 0.3 + 0.4 * torch.rand(3, 1, 1, generator=generator)
        fy, fx = freq[..., 0, None, None], freq[..., 1, None, None]
        waves = sum(torch.sin(2 * np.pi * (fy[:, j] * ys + fx[:, j] * xs) + phase[:, j, None, None])
                    for j in range(2))
        gt = (base + 0.15 * waves).clamp(0.0, 1.0)
        pairs.append((synthesize_low_light(gt, gamma, gain, noise, generator), gt))
    return pairs


def write_pairs(pairs, root_dir, ext='.png'):
    """Write (low, gt) pairs in the :code:`root/{input,gt}/<stem>` layout and
    return the manifest."""
    for sub in (INPUT_DIR, GT_DIR):
        os.makedirs(os.path.join(root_dir, sub), exist_ok=True)
    for i, (low, gt) in enumerate(pairs):
        write_image(os.path.join(root_dir, INPUT_DIR, f'{i:04d}{ext}'), low)
        write_image(os.path.join(root_dir, GT_DIR, f'{i:04d}{ext}'), gt)
    return ingest_dataset(root_dir)
