""" Quality metrics, metric backends and challenge ranking."""

# License: BSD 3 clause

from .full_reference import ssim_metric, psnr_metric, ms_ssim_metric
from .backends import (MetricBackend, METRIC_BACKENDS, register_metric_backend,
                       get_metric_backend, HIGHER_BETTER, LOWER_BETTER, STUB_VALUE,
                       format_value, metric_key)
from .ranking import (MetricRecord, RankTable, CHALLENGE_DIRECTIONS, EXTRA_DIRECTIONS,
                      per_metric_rank, rank_discrepancies, aggregate_ranks,
                      build_rank_table, rank_report, write_rank_report)
from .evaluate import evaluate_directory, DEFAULT_METRICS
