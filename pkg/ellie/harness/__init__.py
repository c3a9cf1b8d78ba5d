""" Training, datasets, tiled inference and checkpoints."""

# License: BSD 3 clause

from .schedules import (WarmupCosineSchedule, CosineRestartSchedule, MultiStepSchedule,
                        CustomSchedule, SCHEDULES)
from .config import (TrainConfig, TilingConfig, HarnessConfig, load_config, build_config,
                     parse_config_text, parse_override)
from .dataset import (DatasetManifest, ingest_dataset, random_patches, synthesize_low_light,
                      make_synthetic_pairs, write_pairs)
from .checkpoint import Checkpoint, save_checkpoint, load_checkpoint
from .tiling import tiled_inference, feather_weights, blend_layout, resolve_mode
from .train import train, ModelEma, selection_score
from .runners import TrainRunner, build_data_filename
