""" Training and harness configuration.

Config files are flat ``key = value`` text. Lines starting with ``#`` are
comments. Values are read as Python literals when they parse as one and
kept as strings otherwise. Keys are grouped by prefix:

========================  ==================================================
``model.name``            zoo model name
``model.<setting>``       builder setting (see the builder's defaults)
``preprocess.<setting>``  preprocessor setting, merged into the model settings
``loss.preset``           loss preset name
``loss.<term>``           weight of a loss term; replaces the preset
``train.<field>``         TrainConfig field
``budget.<field>``        ParamBudget field
``tiling.<field>``        TilingConfig field
========================  ==================================================
"""

# License: BSD 3 clause

import ast
from dataclasses import dataclass, field, fields

from ellie.decorators import lookup
from ellie.errors import ConfigError
from ellie.harness.schedules import SCHEDULES
from ellie.losses import LossConfig, LossTerm, LOSS_TERMS
from ellie.metrics import METRIC_BACKENDS
from ellie.zoo import MODELS, ParamBudget

SELECTION_POLICIES = ('ssim', 'weighted')
TILING_MODES = ('auto', 'exact', 'blend')


@dataclass
class TrainConfig:
    """Settings of one training run.

    Parameters
    ----------
    model: str, default: 'retinex_lite'
        Zoo model name.
    model_cfg: dict, default: {}
        Builder settings.
    loss: LossConfig, default: preset 'kletech'
        Loss terms.
    steps: int, default: 1000
        Optimizer steps.
    patch: int, default: 128
        Side of the square training crops.
    batch: int, default: 4
        Crops per micro-batch.
    lr: float, default: 2e-4
        Peak step size.
    min_lr: float, default: 1e-6
        Step size floor.
    warmup_steps: int, default: 50
        Linear warmup length.
    schedule: str, default: 'warmup_cosine'
        One of 'warmup_cosine', 'cosine_restart', 'multi_step'.
    restart_period: int, default: 250
        First cycle length of 'cosine_restart'.
    milestones: tuple, default: ()
        Decay steps of 'multi_step'.
    decay_gamma: float, default: 0.5
        Decay factor of 'multi_step'.
    weight_decay: float, default: 1e-4
        Decoupled weight decay of AdamW.
    grad_clip: float, default: None
        Largest gradient norm; None disables clipping.
    accumulate: int, default: 1
        Micro-batches per optimizer step.
    ema_decay: float, default: None
        Decay of the weight moving average; None disables it.
    flip: bool, default: True
        Random horizontal and vertical flips.
    rotate: bool, default: False
        Random 90 degree rotations.
    crop: bool, default: True
        Random crops; centre crops otherwise.
    seed: int, default: 0
        Seed of model initialization and sampling.
    val_fraction: float, default: 0.0
        Share of pairs held out for checkpoint selection.
    val_every: int, default: 100
        Steps between validation passes.
    selection: str, default: 'ssim'
        'ssim' or 'weighted' (weighted sum of metrics).
    selection_weights: dict, default: {}
        Metric -> weight for the 'weighted' policy.
    log_every: int, default: 50
        Steps between progress lines.
    """
    model: str = 'retinex_lite'
    model_cfg: dict = field(default_factory=dict)
    loss: LossConfig = field(default_factory=lambda: LossConfig.from_preset('kletech'))
    steps: int = 1000
    patch: int = 128
    batch: int = 4
    lr: float = 2e-4
    min_lr: float = 1e-6
    warmup_steps: int = 50
    schedule: str = 'warmup_cosine'
    restart_period: int = 250
    milestones: tuple = ()
    decay_gamma: float = 0.5
    weight_decay: float = 1e-4
    grad_clip: float = None
    accumulate: int = 1
    ema_decay: float = None
    flip: bool = True
    rotate: bool = False
    crop: bool = True
    seed: int = 0
    val_fraction: float = 0.0
    val_every: int = 100
    selection: str = 'ssim'
    selection_weights: dict = field(default_factory=dict)
    log_every: int = 50

    def __post_init__(self):
        lookup(MODELS, self.model, 'model')
        lookup(SCHEDULES, self.schedule, 'schedule')
        if self.schedule == 'custom':
            raise ConfigError("""schedule 'custom' cannot be set from a config; pass a"""
                              """ CustomSchedule to train() instead.""")
        for name in ('steps', 'patch', 'batch', 'accumulate', 'val_every', 'log_every'):
            if not int(getattr(self, name)) > 0:
                raise ConfigError(f"""{name} must be a positive count.""")
        if self.lr <= 0 or self.min_lr < 0 or self.min_lr > self.lr:
            raise ConfigError("""need 0 <= min_lr <= lr and lr > 0.""")
        if self.warmup_steps < 0:
            raise ConfigError("""warmup_steps must be at least 0.""")
        if self.grad_clip is not None and self.grad_clip <= 0:
            raise ConfigError("""grad_clip must be greater than 0.""")
        if self.ema_decay is not None and not 0 < self.ema_decay < 1:
            raise ConfigError("""ema_decay must be between 0 and 1.""")
        if not 0 <= self.val_fraction < 1:
            raise ConfigError("""val_fraction must be in [0, 1).""")
        if self.selection not in SELECTION_POLICIES:
            raise ConfigError(f"""selection must be one of {SELECTION_POLICIES}.""")
        if self.selection == 'weighted':
            if not self.selection_weights:
                raise ConfigError("""the 'weighted' selection policy needs selection_weights.""")
            for metric in self.selection_weights:
                lookup(METRIC_BACKENDS, metric, 'metric')
        self.milestones = tuple(self.milestones)

    def make_schedule(self):
        """Step size schedule described by this config."""
        if self.schedule == 'cosine_restart':
            return SCHEDULES['cosine_restart'](self.lr, self.restart_period, self.min_lr)
        if self.schedule == 'multi_step':
            return SCHEDULES['multi_step'](self.lr, self.milestones, self.decay_gamma)
        return SCHEDULES['warmup_cosine'](self.lr, max(self.steps, self.warmup_steps + 1),
                                          self.warmup_steps, self.min_lr)

    def to_dict(self):
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d['loss'] = self.loss.to_dict()
        return d


@dataclass
class TilingConfig:
    """Tiled inference settings.

    Parameters
    ----------
    tile: int, default: 512
        Tile side.
    overlap: int, default: None
        Overlap in pixels; None picks the model's receptive radius in exact
        mode and 32 in blend mode.
    mode: str, default: 'auto'
        'auto', 'exact' or 'blend'.
    """
    tile: int = 512
    overlap: int = None
    mode: str = 'auto'

    def __post_init__(self):
        if self.mode not in TILING_MODES:
            raise ConfigError(f"""tiling mode must be one of {TILING_MODES}.""")
        if self.tile < 1 or (self.overlap is not None and self.overlap < 0):
            raise ConfigError("""tile must be positive and overlap non-negative.""")


@dataclass
class HarnessConfig:
    """Everything a config file can set."""
    train: TrainConfig = field(default_factory=TrainConfig)
    budget: ParamBudget = field(default_factory=ParamBudget)
    tiling: TilingConfig = field(default_factory=TilingConfig)


def parse_value(text):
    text = text.strip()
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        return text


def parse_config_text(text):
    """Flat ``key = value`` text to an ordered dict of parsed values."""
    items = {}
    for number, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        key, sep, value = line.partition('=')
        if not sep or not key.strip():
            raise ConfigError(f"""line {number}: expected 'key = value', got '{line}'.""")
        items[key.strip()] = parse_value(value)
    return items


def parse_override(item):
    """'key=value' command line override to a (key, value) pair."""
    key, sep, value = item.partition('=')
    if not sep or not key.strip():
        raise ConfigError(f"""override '{item}' is not of the form key=value.""")
    return key.strip(), parse_value(value)


def build_config(items):
    """HarnessConfig from a dict of prefixed keys; unknown keys raise a
    ConfigError naming them."""
    groups = {'model': {}, 'preprocess': {}, 'loss': {}, 'train': {}, 'budget': {},
              'tiling': {}}
    for key, value in items.items():
        prefix, _, name = key.partition('.')
        if prefix not in groups or not name:
            raise ConfigError(f"""unknown config key '{key}'.""")
        groups[prefix][name] = value

    train_fields = {f.name for f in fields(TrainConfig)} - {'model', 'model_cfg', 'loss'}
    _check_keys('train', groups['train'], train_fields)
    _check_keys('budget', groups['budget'], {f.name for f in fields(ParamBudget)})
    _check_keys('tiling', groups['tiling'], {f.name for f in fields(TilingConfig)})

    model_cfg = dict(groups['model'])
    model = model_cfg.pop('name', TrainConfig.model)
    model_cfg.update(groups['preprocess'])

    train = TrainConfig(model=model, model_cfg=model_cfg, loss=_loss_config(groups['loss']),
                        **groups['train'])
    return HarnessConfig(train, ParamBudget(**groups['budget']),
                         TilingConfig(**groups['tiling']))


def _check_keys(prefix, given, allowed):
    unknown = sorted(set(given) - allowed)
    if unknown:
        raise ConfigError(f"""unknown config key '{prefix}.{unknown[0]}'.""")


def _loss_config(items):
    items = dict(items)
    preset = items.pop('preset', None)
    ramp = items.pop('ramp_steps', {})
    for name in items:
        if name not in LOSS_TERMS:
            raise ConfigError(f"""unknown config key 'loss.{name}'.""")
    if items:
        return LossConfig([LossTerm(n, float(w), ramp_steps=int(ramp.get(n, 0)))
                           for n, w in items.items()])
    return LossConfig.from_preset(preset or 'kletech')


def load_config(path=None, overrides=()):
    """Read a config file (optional) and apply 'key=value' overrides.

    Parameters
    ----------
    path: str, default: None
        Config file.
    overrides: sequence of str or (key, value) pairs, default: ()
        Applied after the file, in order.

    Returns
    -------
    config: HarnessConfig
    """
    items = {}
    if path is not None:
        try:
            with open(path) as f:
                items.update(parse_config_text(f.read()))
        except OSError as e:
            raise ConfigError(f"""cannot read config '{path}': {e}""") from e
    for item in overrides:
        key, value = parse_override(item) if isinstance(item, str) else item
        items[key] = value
    return build_config(items)
