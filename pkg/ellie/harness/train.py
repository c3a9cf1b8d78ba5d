""" Training loop."""

# License: BSD 3 clause

import copy

import pandas as pd
import torch

from ellie.errors import TrainingAbortedError, DataError, ConfigError
from ellie.harness.checkpoint import Checkpoint
from ellie.harness.dataset import DatasetManifest, random_patches
from ellie.losses import composite_loss
from ellie.metrics import get_metric_backend, ssim_metric
from ellie.zoo import build_model


class ModelEma:
    """Exponential moving average of a model's weights.

    Parameters
    ----------
    model: torch.nn.Module
        Model being trained.
    decay: float
        Weight of the running average, e.g. 0.999.
    """

    def __init__(self, model, decay):
        self.decay = decay
        self.shadow = copy.deepcopy(model).eval()
        for p in self.shadow.parameters():
            p.requires_grad_(False)

    @torch.no_grad()
    def update(self, model):
        for ema_v, v in zip(self.shadow.state_dict().values(), model.state_dict().values()):
            if ema_v.dtype.is_floating_point:
                ema_v.mul_(self.decay).add_(v.detach(), alpha=1.0 - self.decay)
            else:
                ema_v.copy_(v)


def selection_score(model, pairs, policy='ssim', weights=None):
    """Validation score of :code:`model` on (low, gt) pairs; higher is better.

    Parameters
    ----------
    policy: str, default: 'ssim'
        'ssim' averages SSIM. 'weighted' sums :code:`weight * value` over the
        metrics in :code:`weights`, negating metrics where lower is better.
    """
    was_training = model.training
    model.eval()
    scores = []
    with torch.no_grad():
        for low, gt in pairs:
            pred = model(low.unsqueeze(0))[0]
            if policy == 'ssim':
                scores.append(ssim_metric(pred, gt))
                continue
            total = 0.0
            for metric, weight in weights.items():
                backend = get_metric_backend(metric)
                sign = 1.0 if backend.direction == 'higher_better' else -1.0
                total += sign * weight * backend(pred, gt)
            scores.append(total)
    model.train(was_training)
    return sum(scores) / len(scores)


def _as_pairs(data, n_jobs):
    if isinstance(data, DatasetManifest):
        return data.load(n_jobs=n_jobs)
    return list(data)


def train(cfg, data, val_data=None, callback=None, n_jobs=1, schedule=None):
    """Optimize a zoo model on paired images.

    AdamW with decoupled weight decay follows :code:`cfg.make_schedule()`.
    Every step draws :code:`cfg.accumulate` micro-batches of random patches,
    optionally clips the gradient norm and updates the weight average.
    With validation data, the weights scoring best under the selection
    policy are kept; otherwise the final (averaged) weights are.

    Parameters
    ----------
    cfg: TrainConfig
        Run settings.
    data: DatasetManifest or list of (tensor, tensor)
        Training pairs.
    val_data: DatasetManifest or list of (tensor, tensor), default: None
        Held-out pairs. When None and :code:`cfg.val_fraction` is positive,
        a manifest is split accordingly.
    callback: callable, default: None
        :code:`callback(step, loss, breakdown, lr, done)` after every step.
    n_jobs: int, default: 1
        Workers for image decoding.
    schedule: schedule object, default: None
        Anything with :code:`evaluate(t)`, such as a :code:`CustomSchedule`.
        Replaces :code:`cfg.make_schedule()` when given.

    Returns
    -------
    checkpoint: Checkpoint
        Selected weights.
    log: pandas.DataFrame
        One row per step: step, lr, loss and the per-term breakdown.

    Raises
    ------
    TrainingAbortedError
        The loss became non-finite.
    """
    if val_data is None and cfg.val_fraction > 0 and isinstance(data, DatasetManifest):
        data, val_data = data.split(cfg.val_fraction, cfg.seed)
    pairs = _as_pairs(data, n_jobs)
    val_pairs = _as_pairs(val_data, n_jobs) if val_data is not None and len(val_data) else []
    if not pairs:
        raise DataError("""no training pairs.""")

    torch.manual_seed(cfg.seed)
    generator = torch.Generator().manual_seed(cfg.seed)
    model = build_model(cfg.model, cfg.model_cfg)
    model.train()
    schedule = cfg.make_schedule() if schedule is None else schedule
    if not callable(getattr(schedule, 'evaluate', None)):
        raise ConfigError("""schedule must provide evaluate(t).""")
    optimizer = torch.optim.AdamW(model.parameters(), lr=schedule.evaluate(0),
                                  weight_decay=cfg.weight_decay)
    ema = ModelEma(model, cfg.ema_decay) if cfg.ema_decay else None

    rows, best_score, best_state, best_step = [], None, None, None
    for step in range(cfg.steps):
        lr = schedule.evaluate(step)
        for group in optimizer.param_groups:
            group['lr'] = lr

        optimizer.zero_grad()
        loss_value, breakdown = 0.0, {}
        for _ in range(cfg.accumulate):
            low, gt = random_patches(pairs, cfg.batch, cfg.patch, generator,
                                     cfg.crop, cfg.flip, cfg.rotate)
            loss, terms = composite_loss(cfg.loss, model(low), gt, step)
            if not torch.isfinite(loss):
                raise TrainingAbortedError(step, terms)
            (loss / cfg.accumulate).backward()
            loss_value += float(loss.detach()) / cfg.accumulate
            for name, value in terms.items():
                breakdown[name] = breakdown.get(name, 0.0) + value / cfg.accumulate

        if cfg.grad_clip is not None:
            torch.nn.utils.clip_grad_norm_(model.parameters(), cfg.grad_clip)
        optimizer.step()
        if ema is not None:
            ema.update(model)

        rows.append({'step': step, 'lr': lr, 'loss': loss_value, **breakdown})
        done = step == cfg.steps - 1
        current = ema.shadow if ema is not None else model

        if val_pairs and ((step + 1) % cfg.val_every == 0 or done):
            score = selection_score(current, val_pairs, cfg.selection, cfg.selection_weights)
            rows[-1]['val_score'] = score
            if best_score is None or score > best_score:
                best_score, best_step = score, step
                best_state = copy.deepcopy(current.state_dict())

        if callback is not None:
            callback(step, loss_value, breakdown, lr, done)

    final = ema.shadow if ema is not None else model
    if best_state is not None:
        final.load_state_dict(best_state)
    checkpoint = Checkpoint.from_model(final.eval(), best_step if best_step is not None
                                       else cfg.steps - 1)
    return checkpoint, pd.DataFrame(rows)
