""" ellie initialization file."""

# License: BSD 3 clause

from .errors import (EllieError, ShapeError, DomainError, ConfigError, DataError, BudgetError,
                     IntegrityError, ConversionError, UsageError, TrainingAbortedError,
                     BackendError)
from .decorators import (get_short_name)

from .colorspace import (rgb_to_grayscale, luminance_scalar, rgb_to_yuv, yuv_to_rgb,
                         rgb_to_lab, lab_to_rgb, HviImage, HviTransform, intensity_collapse,
                         rgb_to_hvi, hvi_to_rgb, make_virtual_exposures)
from .classical import (HistogramSpec, histogram_equalize, clahe, lowres_histogram_equalize,
                        equalize_image, clahe_image, lowres_equalize_image, apply_gamma_map,
                        exposure_fusion, Preprocessor)
from .blocks import (BlockConfig, BLOCK_KINDS, Conv, DWSConv, PartialConv, MBRConv,
                     ResidualDWSBlock, Downsample, Upsample, ChannelAttention,
                     SimplifiedChannelAttention, SpatialGate, SimpleGate, NAFBlock,
                     CrossAttention, ICNModulate, IlluminationAdjust, PhaseTransfer,
                     dws_conv, mbr_conv_forward, simple_gate, icn_modulate, phase_transfer,
                     retinex_reconstruct)
from .reparam import (ConvBranchSpec, ConvParams, NormStats, fold_norm, pad_kernel,
                      merge_branches, reparameterize_model)
from .zoo import (ModelSpec, NodeSpec, ParamBudget, BudgetReport, GraphEnhancer, count_params,
                  audit_budget, build_norm_unet, build_efficient_hvi, build_mobileie6,
                  build_retinex_lite, build_spec, build_model)
from .losses import (l1_loss, charbonnier_loss, smooth_l1_loss, luma_loss, ssim_loss,
                     ms_ssim_loss, tv_loss, color_constancy_loss, exposure_loss,
                     spatial_consistency_loss, frequency_loss, gradient_edge_loss,
                     perceptual_loss, FeatureExtractor, RandomPyramidBackend, LossTerm,
                     LossConfig, composite_loss)
from .metrics import (ssim_metric, psnr_metric, MetricBackend, register_metric_backend,
                      MetricRecord, RankTable, CHALLENGE_DIRECTIONS, per_metric_rank,
                      rank_discrepancies, aggregate_ranks, build_rank_table, rank_report,
                      evaluate_directory, metric_key)
from .harness import (WarmupCosineSchedule, CosineRestartSchedule, MultiStepSchedule,
                      CustomSchedule, TrainConfig, TilingConfig, load_config, DatasetManifest,
                      ingest_dataset, make_synthetic_pairs, Checkpoint, save_checkpoint,
                      load_checkpoint, tiled_inference, feather_weights, train, TrainRunner,
                      build_data_filename)
from .cli import cli
