""" Registry of per-image metric backends.

Learned metrics (LPIPS, DISTS) and no-reference metrics (LIQE, MUSIQ,
Q-Align) depend on external weights. They are registered as stubs that
return :code:`STUB_VALUE`; results from a stub are flagged in reports and
are not authoritative. Register a real implementation under the same name
to replace a stub.
"""

# License: BSD 3 clause

import math
import re
from dataclasses import dataclass

from ellie.decorators import lookup
from ellie.errors import ConfigError
from ellie.metrics.full_reference import ssim_metric, psnr_metric, ms_ssim_metric

HIGHER_BETTER = 'higher_better'
LOWER_BETTER = 'lower_better'
DIRECTIONS = (HIGHER_BETTER, LOWER_BETTER)

STUB_VALUE = 0.0

METRIC_BACKENDS = {}


@dataclass
class MetricBackend:
    """A named per-image metric.

    Parameters
    ----------
    name: str
        Metric name used in reports.
    fn: callable
        :code:`fn(pred, gt)` returning a float; :code:`gt` is ignored by
        no-reference metrics.
    direction: str
        'higher_better' or 'lower_better'.
    no_reference: bool, default: False
        Metric uses the prediction only.
    is_stub: bool, default: False
        Placeholder returning a constant.
    """
    name: str
    fn: callable
    direction: str
    no_reference: bool = False
    is_stub: bool = False

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise ConfigError(f"""direction must be one of {DIRECTIONS}.""")

    def __call__(self, pred, gt=None):
        return float(self.fn(pred, gt))


def register_metric_backend(backend):
    """Add or replace a backend in METRIC_BACKENDS."""
    METRIC_BACKENDS[backend.name] = backend
    return backend


def get_metric_backend(name):
    return lookup(METRIC_BACKENDS, name, 'metric')


def _fold(name):
    return re.sub(r'[^a-z0-9]', '', str(name).lower())


def metric_key(name):
    """Canonical metric key: the registered backend name that matches
    :code:`name` up to case and punctuation ('SSIM' -> 'ssim', 'Q-Align' ->
    'qalign', 'MS-SSIM' -> 'ms_ssim'). Other names are lower-cased."""
    folded = _fold(name)
    for key in METRIC_BACKENDS:
        if _fold(key) == folded:
            return key
    return str(name).strip().lower()


def _stub(pred, gt):
    return STUB_VALUE


register_metric_backend(MetricBackend('ssim', ssim_metric, HIGHER_BETTER))
register_metric_backend(MetricBackend('psnr', psnr_metric, HIGHER_BETTER))
register_metric_backend(MetricBackend('ms_ssim', ms_ssim_metric, HIGHER_BETTER))
for _name, _direction, _no_ref in (('lpips', LOWER_BETTER, False),
                                   ('dists', LOWER_BETTER, False),
                                   ('liqe', HIGHER_BETTER, True),
                                   ('musiq', HIGHER_BETTER, True),
                                   ('qalign', HIGHER_BETTER, True)):
    register_metric_backend(MetricBackend(_name, _stub, _direction, _no_ref, is_stub=True))


def format_value(value):
    """Report form of a metric value; infinities become 'inf'/'-inf'."""
    if isinstance(value, float) and math.isinf(value):
        return 'inf' if value > 0 else '-inf'
    return value
