""" Image decoding and encoding between files and [0, 1] tensors."""

# License: BSD 3 clause

import os

import numpy as np
import torch
from PIL import Image

from ellie.errors import DataError, ShapeError

IMAGE_EXTENSIONS = ('.png', '.jpg', '.jpeg')


def is_image_file(path):
    return os.path.splitext(path)[1].lower() in IMAGE_EXTENSIONS


def read_image(path):
    """Decode a PNG or JPEG file into a float32 tensor of shape (3, H, W)
    with values in [0, 1].

    8-bit images are scaled by 1/255 and 16-bit images by 1/65535;
    grayscale images are replicated to three channels.
    """
    try:
        with Image.open(path) as im:
            im.load()
            if im.mode in ('I;16', 'I;16B', 'I;16L', 'I'):
                arr = np.asarray(im, dtype=np.float64) / 65535.0
                arr = np.repeat(arr[None], 3, axis=0)
            else:
                arr = np.asarray(im.convert('RGB'), dtype=np.float64).transpose(2, 0, 1) / 255.0
    except (OSError, ValueError) as e:
        raise DataError(f"""cannot decode image '{path}': {e}""") from e
    return torch.from_numpy(np.clip(arr, 0.0, 1.0).astype(np.float32))


def write_image(path, img, bits=8):
    """Encode a (3, H, W) or (1, H, W) tensor in [0, 1] to a PNG or JPEG.

    Parameters
    ----------
    path: str
        Output file; the extension selects the format.
    img: tensor
        Image with values in [0, 1]; values outside are clipped.
    bits: int, default: 8
        8 or 16. 16-bit output is written for single-channel PNGs only.
    """
    img = img.detach().cpu()
    if img.dim() == 4 and img.shape[0] == 1:
        img = img[0]
    if img.dim() != 3 or img.shape[0] not in (1, 3):
        raise ShapeError(f"""cannot write an image of shape {tuple(img.shape)}.""")
    arr = np.clip(img.numpy().astype(np.float64), 0.0, 1.0)
    if bits == 16 and img.shape[0] == 1 and path.lower().endswith('.png'):
        Image.fromarray(np.round(arr[0] * 65535.0).astype(np.uint16)).save(path)
        return
    arr = np.round(arr * 255.0).astype(np.uint8)
    if arr.shape[0] == 1:
        Image.fromarray(arr[0]).save(path)
    else:
        Image.fromarray(np.ascontiguousarray(arr.transpose(1, 2, 0))).save(path)


def list_images(directory):
    """Sorted image file names (not paths) in :code:`directory`."""
    if not os.path.isdir(directory):
        raise DataError(f"""'{directory}' is not a directory.""")
    return sorted(f for f in os.listdir(directory) if is_image_file(f))
