""" Directory-level evaluation of enhanced images against references."""

# License: BSD 3 clause

import json
import os
import warnings

import pandas as pd
from joblib import Parallel, delayed

from ellie.errors import DataError
from ellie.imageio import read_image, list_images
from ellie.metrics.backends import get_metric_backend, format_value, metric_key

DEFAULT_METRICS = ('ssim', 'psnr')


def _stem(name):
    return os.path.splitext(name)[0]


def _evaluate_pair(pred_path, gt_path, metrics):
    pred, gt = read_image(pred_path), read_image(gt_path)
    if pred.shape != gt.shape:
        return None
    return {m: get_metric_backend(m)(pred, gt) for m in metrics}


def evaluate_directory(pred_dir, gt_dir, metrics=DEFAULT_METRICS, team=None, params=None,
                       n_jobs=1, output_prefix=None):
    """Score every prediction against the reference with the same stem.

    Parameters
    ----------
    pred_dir, gt_dir: str
        Directories of PNG/JPEG images.
    metrics: sequence of str, default: ('ssim', 'psnr')
        Metric backend names, matched through :code:`metric_key`. The
        aggregate uses the canonical keys, as the ranking does.
    team: str, default: None
        Name written to the aggregate; defaults to the prediction directory
        name.
    params: int, default: None
        Parameter count written to the aggregate.
    n_jobs: int, default: 1
        joblib worker count for per-image evaluation.
    output_prefix: str, default: None
        When given, writes :code:`<prefix>.csv` (columns
        :code:`image,metric,value`) and :code:`<prefix>.json`.

    Returns
    -------
    per_image: pandas.DataFrame
        Long-format table with columns image, metric, value.
    aggregate: dict
        :code:`{team, values, params, stubs, images}`; values are means over
        images, infinite values are reported as 'inf'.
    """
    metrics = tuple(metric_key(m) for m in metrics)
    backends = [get_metric_backend(m) for m in metrics]
    preds = {_stem(f): f for f in list_images(pred_dir)}
    gts = {_stem(f): f for f in list_images(gt_dir)}
    unmatched = sorted(set(preds) ^ set(gts))
    if unmatched:
        warnings.warn(f'skipping unmatched images: {unmatched}')
    stems = sorted(set(preds) & set(gts))
    if not stems:
        raise DataError(f"""no matching images between '{pred_dir}' and '{gt_dir}'.""")

    results = Parallel(n_jobs=n_jobs)(
        delayed(_evaluate_pair)(os.path.join(pred_dir, preds[s]), os.path.join(gt_dir, gts[s]),
                                tuple(metrics))
        for s in stems)

    rows = []
    for stem, scores in zip(stems, results):
        if scores is None:
            warnings.warn(f'skipping {stem}: prediction and reference sizes differ')
            continue
        rows.extend({'image': preds[stem], 'metric': m, 'value': v} for m, v in scores.items())
    if not rows:
        raise DataError("""no evaluable image pairs.""")
    per_image = pd.DataFrame(rows, columns=['image', 'metric', 'value'])

    means = per_image.groupby('metric', sort=False)['value'].mean()
    aggregate = {
        'team': team if team is not None else os.path.basename(os.path.normpath(pred_dir)),
        'values': {m: format_value(float(means[m])) for m in metrics},
        'params': params,
        'stubs': [b.name for b in backends if b.is_stub],
        'images': int(per_image['image'].nunique()),
    }
    if aggregate['stubs']:
        warnings.warn(f'stub metrics are not authoritative: {aggregate["stubs"]}')

    if output_prefix is not None:
        per_image.assign(value=per_image['value'].map(format_value)).to_csv(
            f'{output_prefix}.csv', index=False)
        with open(f'{output_prefix}.json', 'w') as f:
            json.dump(aggregate, f, indent=2)
    return per_image, aggregate
