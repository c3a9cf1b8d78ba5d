""" Parameter accounting and budget auditing."""

# License: BSD 3 clause

from dataclasses import dataclass, field

import pandas as pd

from ellie.errors import BudgetError, ConfigError

BYTES_PER_PARAM = {'float32': 4, 'float16': 2}


@dataclass
class ParamBudget:
    """Model size limits.

    Parameters
    ----------
    max_params: int, default: 1000000
        Largest allowed learnable-scalar count.
    max_serialized_bytes: int, default: 1000000
        Largest allowed parameter payload at :code:`precision`; None
        disables the byte check.
    precision: str, default: 'float32'
        Storage precision, 'float32' or 'float16'.
    """
    max_params: int = 1_000_000
    max_serialized_bytes: int = 1_000_000
    precision: str = 'float32'

    def __post_init__(self):
        if self.max_params < 1:
            raise ConfigError("""max_params must be positive.""")
        if self.max_serialized_bytes is not None and self.max_serialized_bytes < 1:
            raise ConfigError("""max_serialized_bytes must be positive.""")
        if self.precision not in BYTES_PER_PARAM:
            raise ConfigError(f"""precision must be one of {sorted(BYTES_PER_PARAM)}.""")

    @property
    def bytes_per_param(self):
        return BYTES_PER_PARAM[self.precision]


def node_param_counts(spec):
    """Per-node learnable-scalar counts as a DataFrame (node, kind, params)."""
    rows = [(n.name, n.kind, n.block.param_count(n.config)) for n in spec.nodes]
    if spec.colorspace_mode == 'hvi':
        rows.append(('hvi_k', 'colorspace', 1))
    return pd.DataFrame(rows, columns=['node', 'kind', 'params'])


def count_params(spec):
    """Exact learnable-scalar count of a ModelSpec, without instantiating it.

    Example
    -------
    .. highlight:: python
    .. code-block:: python

        >>> import ellie
        >>> spec = ellie.ModelSpec('one_conv', [
        ...     ellie.NodeSpec('x', 'input'),
        ...     ellie.NodeSpec('conv', 'conv', ellie.BlockConfig(3, 3, kernel=3), ('x',))])
        >>> ellie.count_params(spec)
        84
    """
    return int(node_param_counts(spec)['params'].sum())


@dataclass
class BudgetReport:
    """Outcome of :code:`audit_budget`."""
    model: str
    per_node: pd.DataFrame
    total_params: int
    budget: ParamBudget
    serialized_bytes: int
    messages: list = field(default_factory=list)

    @property
    def param_overflow(self):
        return max(0, self.total_params - self.budget.max_params)

    @property
    def byte_overflow(self):
        if self.budget.max_serialized_bytes is None:
            return 0
        return max(0, self.serialized_bytes - self.budget.max_serialized_bytes)

    @property
    def params_ok(self):
        return self.param_overflow == 0

    @property
    def bytes_ok(self):
        return self.byte_overflow == 0

    @property
    def passed(self):
        return self.params_ok and self.bytes_ok

    def to_dict(self):
        return {'model': self.model, 'total_params': self.total_params,
                'max_params': self.budget.max_params, 'params_ok': self.params_ok,
                'param_overflow': self.param_overflow, 'precision': self.budget.precision,
                'serialized_bytes': self.serialized_bytes,
                'max_serialized_bytes': self.budget.max_serialized_bytes,
                'bytes_ok': self.bytes_ok, 'byte_overflow': self.byte_overflow,
                'passed': self.passed,
                'per_node': self.per_node.to_dict(orient='records'),
                'messages': list(self.messages)}


def audit_budget(spec, budget=None):
    """Check a ModelSpec against a parameter budget and a serialized-size
    budget, reported separately.

    Parameters
    ----------
    spec: ModelSpec
        Model to audit.
    budget: ParamBudget, default: None
        Limits. Defaults to :code:`ParamBudget()`.

    Returns
    -------
    report: BudgetReport
        Per-node counts, total, payload size at the budget's precision and a
        verdict; :code:`messages` names any overflow.
    """
    budget = budget or ParamBudget()
    per_node = node_param_counts(spec)
    total = int(per_node['params'].sum())
    report = BudgetReport(spec.name, per_node, total, budget, total * budget.bytes_per_param)

    if not report.params_ok:
        report.messages.append(f'{total} params exceed the budget of {budget.max_params}'
                               f' by {report.param_overflow}')
    if not report.bytes_ok:
        report.messages.append(f'{report.serialized_bytes} bytes at {budget.precision} exceed'
                               f' the budget of {budget.max_serialized_bytes}'
                               f' by {report.byte_overflow}')
    return report


def enforce_budget(spec, max_params):
    """Raise a BudgetError naming the count when :code:`spec` has more than
    :code:`max_params` learnable scalars."""
    total = count_params(spec)
    if total > max_params:
        raise BudgetError(f"""{spec.name} has {total} params, over the budget of"""
                          f""" {max_params} by {total - max_params}.""")
    return total
