""" Classes for per-metric ranking and challenge rank aggregation.

Each metric ranks teams with competition ranking (ties share the best
rank, following ranks are skipped). Teams are ordered by the sum of their
per-metric ranks; equal sums are broken in favour of fewer parameters.
"""

# License: BSD 3 clause

import json
import math
from dataclasses import dataclass, field

import pandas as pd

from ellie.errors import ConfigError, DataError
from ellie.metrics.backends import HIGHER_BETTER, LOWER_BETTER, DIRECTIONS, metric_key

# keyed by metric backend name
CHALLENGE_DIRECTIONS = {
    'ssim': HIGHER_BETTER,
    'lpips': LOWER_BETTER,
    'dists': LOWER_BETTER,
    'liqe': HIGHER_BETTER,
    'musiq': HIGHER_BETTER,
    'qalign': HIGHER_BETTER,
}

EXTRA_DIRECTIONS = {'psnr': HIGHER_BETTER, 'ms_ssim': HIGHER_BETTER}


def _keyed(mapping, what):
    """Copy of a metric -> x dict under canonical metric keys."""
    keyed = {}
    for name, value in mapping.items():
        key = metric_key(name)
        if key in keyed:
            raise DataError(f"""{what} name metric '{key}' more than once.""")
        keyed[key] = value
    return keyed


@dataclass
class MetricRecord:
    """Metric values and parameter count of one team.

    Parameters
    ----------
    team: str
        Team identifier.
    values: dict
        Metric name -> value. Names are stored as :code:`metric_key(name)`,
        so 'SSIM' and 'ssim' are the same metric.
    params: int
        Learnable parameter count, greater than 0.
    ranks: dict, default: None
        Optional externally supplied rank per metric.
    """
    team: str
    values: dict
    params: int
    ranks: dict = None

    def __post_init__(self):
        if self.params is None or not int(self.params) > 0:
            raise DataError(f"""team '{self.team}' needs a positive parameter count.""")
        self.params = int(self.params)
        self.values = _keyed(self.values, f"team '{self.team}' values")
        if self.ranks is not None:
            self.ranks = _keyed(self.ranks, f"team '{self.team}' ranks")

    def to_dict(self):
        d = {'team': self.team, 'values': dict(self.values), 'params': self.params}
        if self.ranks is not None:
            d['ranks'] = dict(self.ranks)
        return d

    @classmethod
    def from_dict(cls, d):
        try:
            values = {k: math.inf if v == 'inf' else v for k, v in d['values'].items()}
            return cls(d['team'], values, d.get('params'), d.get('ranks'))
        except (KeyError, TypeError, AttributeError) as e:
            raise DataError(f"""malformed metric record: missing {e}.""") from None


def per_metric_rank(values, direction):
    """Competition ranking of one metric.

    Parameters
    ----------
    values: dict
        Team -> finite metric value.
    direction: str
        'higher_better' or 'lower_better'.

    Returns
    -------
    ranks: dict
        Team -> rank, 1 being best.

    Example
    -------
    .. highlight:: python
    .. code-block:: python

        >>> import ellie
        >>> ellie.per_metric_rank({'A': 0.5, 'B': 0.5, 'C': 0.4}, 'higher_better')
        {'A': 1, 'B': 1, 'C': 3}
    """
    if not values:
        raise ConfigError("""cannot rank an empty set of values.""")
    if direction not in DIRECTIONS:
        raise ConfigError(f"""direction must be one of {DIRECTIONS}.""")
    series = pd.Series(values, dtype=float)
    if not series.map(math.isfinite).all():
        raise ConfigError("""metric values must be finite to be ranked.""")
    ranks = series.rank(method='min', ascending=direction == LOWER_BETTER)
    return {team: int(r) for team, r in ranks.items()}


def rank_discrepancies(values, supplied_ranks, direction):
    """Teams whose supplied rank differs from the rank derived from their
    value.

    Returns
    -------
    report: pandas.DataFrame
        Columns :code:`team, value, supplied_rank, derived_rank`, one row per
        disagreement, ordered by team.
    """
    derived = per_metric_rank(values, direction)
    rows = [{'team': t, 'value': values[t], 'supplied_rank': int(supplied_ranks[t]),
             'derived_rank': derived[t]}
            for t in sorted(values) if t in supplied_ranks and int(supplied_ranks[t]) != derived[t]]
    return pd.DataFrame(rows, columns=['team', 'value', 'supplied_rank', 'derived_rank'])


@dataclass
class RankTable:
    """Per-metric ranks of a set of teams.

    Parameters
    ----------
    per_metric_ranks: dict
        Metric -> (team -> rank).
    directions: dict
        Metric -> 'higher_better' or 'lower_better'.
    discrepancies: dict, default: {}
        Metric -> DataFrame from :code:`rank_discrepancies`, present when
        the ranks were supplied rather than derived.
    """
    per_metric_ranks: dict
    directions: dict
    discrepancies: dict = field(default_factory=dict)

    def __post_init__(self):
        missing = set(self.per_metric_ranks) ^ set(self.directions)
        if missing:
            raise DataError(f"""metrics without both ranks and direction: {sorted(missing)}.""")

    @property
    def teams(self):
        return sorted({t for ranks in self.per_metric_ranks.values() for t in ranks})

    def rank_sums(self):
        self.check_complete()
        return {t: sum(int(r[t]) for r in self.per_metric_ranks.values()) for t in self.teams}

    def check_complete(self):
        """Raise a DataError naming the first team missing from a metric."""
        for metric, ranks in self.per_metric_ranks.items():
            for team in self.teams:
                if team not in ranks:
                    raise DataError(f"""team '{team}' has no rank for metric '{metric}'.""")


def aggregate_ranks(table, params):
    """Final challenge ranking.

    Parameters
    ----------
    table: RankTable or dict
        Per-metric ranks (a dict metric -> team -> rank is accepted).
    params: dict
        Team -> parameter count.

    Returns
    -------
    final_ranking: list of dict
        Entries :code:`{final_rank, team, rank_sum, params}` ordered by
        ascending rank sum, then ascending parameter count.
    """
    if not isinstance(table, RankTable):
        table = RankTable(dict(table), {m: HIGHER_BETTER for m in table})
    if not table.per_metric_ranks:
        raise DataError("""rank table has no metrics.""")
    sums = table.rank_sums()
    for team in sums:
        if team not in params:
            raise DataError(f"""team '{team}' has no parameter count.""")
    order = sorted(sums, key=lambda t: (sums[t], params[t], t))
    return [{'final_rank': i + 1, 'team': t, 'rank_sum': sums[t], 'params': int(params[t])}
            for i, t in enumerate(order)]


def build_rank_table(records, directions=None):
    """Rank a list of MetricRecord objects.

    Ranks supplied on the records are used verbatim when every record
    carries them for every metric; a discrepancy report against the
    value-derived ranks is attached. Otherwise ranks are derived from the
    values.

    Parameters
    ----------
    records: list of MetricRecord
        One record per team.
    directions: dict, default: None
        Metric -> direction, names matched through :code:`metric_key`.
        Defaults to CHALLENGE_DIRECTIONS.

    Returns
    -------
    table: RankTable
    """
    if not records:
        raise DataError("""no metric records to rank.""")
    directions = _keyed(CHALLENGE_DIRECTIONS if directions is None else directions,
                        'directions')
    teams = [r.team for r in records]
    if len(set(teams)) != len(teams):
        raise DataError(f"""duplicate teams in {teams}.""")
    for r in records:
        for metric in directions:
            if metric not in r.values:
                raise DataError(f"""team '{r.team}' has no value for metric '{metric}'.""")

    supplied = all(r.ranks is not None and all(m in r.ranks for m in directions) for r in records)
    per_metric, discrepancies = {}, {}
    for metric, direction in directions.items():
        values = {r.team: r.values[metric] for r in records}
        if supplied:
            per_metric[metric] = {r.team: int(r.ranks[metric]) for r in records}
            discrepancies[metric] = rank_discrepancies(values, per_metric[metric], direction)
        else:
            per_metric[metric] = per_metric_rank(values, direction)
    return RankTable(per_metric, directions, discrepancies)


def rank_report(records, directions=None):
    """JSON-ready report :code:`{directions, per_metric_ranks, rank_sums,
    final_ranking}` (plus :code:`discrepancies` when ranks were supplied)."""
    table = build_rank_table(records, directions)
    report = {
        'directions': table.directions,
        'per_metric_ranks': table.per_metric_ranks,
        'rank_sums': table.rank_sums(),
        'final_ranking': aggregate_ranks(table, {r.team: r.params for r in records}),
    }
    if table.discrepancies:
        report['discrepancies'] = {m: df.to_dict(orient='records')
                                   for m, df in table.discrepancies.items() if len(df)}
    return report


def write_rank_report(report, path):
    with open(path, 'w') as f:
        json.dump(report, f, indent=2, sort_keys=False)
