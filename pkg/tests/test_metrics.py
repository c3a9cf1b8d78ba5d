""" Unit tests for metrics"""

# License: BSD 3 clause

import json
import math
import os
import tempfile
import unittest
import warnings

import pandas as pd
import torch

from ellie import (ssim_metric, psnr_metric, MetricBackend, register_metric_backend,
                   MetricRecord, RankTable, CHALLENGE_DIRECTIONS, per_metric_rank,
                   rank_discrepancies, aggregate_ranks, build_rank_table, rank_report,
                   evaluate_directory, metric_key, ConfigError, DataError, ShapeError)
from ellie.imageio import write_image
from ellie.metrics import (get_metric_backend, METRIC_BACKENDS, STUB_VALUE, HIGHER_BETTER,
                           LOWER_BETTER)

METRICS = list(CHALLENGE_DIRECTIONS)

# team: (ranks per metric, printed values per metric, params, final rank)
CHALLENGE_TABLE = {
    'MiVideo': ((8, 1, 1, 1, 1, 1), (.5654, .3632, .1376, 3.2561, 68.8805, 3.7699), 927049, 1),
    'CVPR TCD': ((14, 2, 3, 2, 5, 2), (.5500, .4801, .2005, 2.8661, 63.9676, 3.3778), 557618, 2),
    'S3': ((16, 6, 2, 3, 2, 3), (.5183, .4157, .2222, 2.3865, 64.9443, 3.3718), 741600, 3),
    'sun': ((7, 9, 4, 7, 4, 4), (.5688, .4446, .2231, 2.2382, 62.4497, 3.2333), 907414, 4),
    'NCHU-CVLab': ((10, 5, 7, 4, 8, 10), (.5557, .5045, .2542, 2.3933, 62.0570, 3.3015),
                   957239, 5),
    'NUDT_DeepIter': ((15, 4, 8, 6, 7, 5), (.5211, .5031, .2317, 2.4856, 61.7693, 3.2415),
                      897160, 6),
    'HIT-LLIE-team': ((4, 8, 11, 9, 12, 6), (.5766, .5176, .2319, 2.2977, 60.3387, 3.2007),
                      101922, 7),
    'VARCHASVI_SVNIT': ((9, 17, 5, 12, 3, 8), (.5575, .4408, .2414, 1.5017, 62.2430, 3.0040),
                        890915, 8),
    'Xie_Liu': ((11, 7, 6, 8, 10, 12), (.5551, .5171, .2791, 2.3798, 62.0840, 3.2130),
                913388, 9),
    'JialuXu(IVC)': ((17, 3, 10, 5, 11, 9), (.5122, .5171, .2430, 2.6049, 60.6554, 3.2501),
                     919594, 10),
    'Bustaaa': ((12, 10, 9, 16, 9, 7), (.5509, .5143, .2397, 2.1875, 61.2102, 2.9807),
                205361, 11),
    'sysu_701': ((5, 12, 14, 15, 6, 16), (.5748, .4828, .2924, 2.1568, 56.7397, 2.9837),
                 965254, 12),
    'SYSU-FVL_ELLIE': ((1, 13, 15, 11, 15, 13), (.5819, .5561, .2804, 2.1494, 55.9899, 3.0264),
                       994871, 13),
    'KLETech-CEVI': ((2, 11, 13, 14, 17, 17), (.5791, .5894, .3019, 2.1737, 57.5888, 2.9884),
                     525429, 14),
    'ShinNam!': ((3, 15, 17, 13, 16, 11), (.5789, .5711, .2677, 2.0345, 53.9563, 2.9956),
                 726498, 15),
    'IIMAS-UNAM': ((13, 14, 12, 10, 14, 14), (.5504, .5536, .2805, 2.0970, 57.9082, 3.1247),
                   890915, 16),
    'Cidaut AI': ((6, 16, 16, 17, 13, 15), (.5731, .5282, .2882, 1.9627, 54.5327, 2.7156),
                  797222, 17),
}

RANK_SUMS = {'MiVideo': 13, 'CVPR TCD': 28, 'S3': 32, 'sun': 35, 'NCHU-CVLab': 44,
             'NUDT_DeepIter': 45, 'HIT-LLIE-team': 50, 'VARCHASVI_SVNIT': 54, 'Xie_Liu': 54,
             'JialuXu(IVC)': 55, 'Bustaaa': 63, 'sysu_701': 68, 'SYSU-FVL_ELLIE': 68,
             'KLETech-CEVI': 74, 'ShinNam!': 75, 'IIMAS-UNAM': 77, 'Cidaut AI': 83}


def challenge_records(with_ranks=True):
    return [MetricRecord(team, dict(zip(METRICS, values)), params,
                         dict(zip(METRICS, ranks)) if with_ranks else None)
            for team, (ranks, values, params, _) in CHALLENGE_TABLE.items()]


class TestFullReference(unittest.TestCase):
    """Tests for SSIM and PSNR."""

    @staticmethod
    def test_psnr_twenty_db():
        """Test a uniform error of 0.1 gives 20 dB"""
        gt = torch.full((3, 8, 8), 0.5)
        assert abs(psnr_metric(gt + 0.1, gt) - 20.0) < 1e-4

    @staticmethod
    def test_identical_images():
        """Test identical images give infinite PSNR and unit SSIM"""
        img = torch.rand(1, 3, 32, 32, generator=torch.Generator().manual_seed(0))
        assert psnr_metric(img, img) == math.inf
        assert abs(ssim_metric(img, img) - 1.0) < 1e-12

    def test_shape_mismatch(self):
        """Test mismatched images are rejected"""
        with self.assertRaises(ShapeError):
            psnr_metric(torch.zeros(3, 8, 8), torch.zeros(3, 8, 9))
        with self.assertRaises(ShapeError):
            ssim_metric(torch.zeros(8, 8), torch.zeros(8, 8))


class TestBackends(unittest.TestCase):
    """Tests for the metric backend registry."""

    @staticmethod
    def test_stubs_flagged():
        """Test learned and no-reference metrics are flagged stubs"""
        for name in ('lpips', 'dists', 'liqe', 'musiq', 'qalign'):
            backend = get_metric_backend(name)
            assert backend.is_stub
            assert backend(torch.zeros(3, 4, 4)) == STUB_VALUE
        assert get_metric_backend('liqe').no_reference
        assert get_metric_backend('lpips').direction == LOWER_BETTER
        assert not get_metric_backend('ssim').is_stub

    @staticmethod
    def test_register_replaces_stub():
        """Test a registered backend replaces the stub of the same name"""
        stub = get_metric_backend('musiq')
        try:
            register_metric_backend(MetricBackend('musiq', lambda p, g: 42.0, HIGHER_BETTER,
                                                  no_reference=True))
            assert get_metric_backend('musiq')(torch.zeros(3, 4, 4)) == 42.0
        finally:
            register_metric_backend(stub)

    @staticmethod
    def test_metric_key():
        """Test printed metric names map onto backend names"""
        assert metric_key('SSIM') == 'ssim'
        assert metric_key('Q-Align') == 'qalign'
        assert metric_key('MS-SSIM') == 'ms_ssim'
        assert metric_key(' NIQE ') == 'niqe'
        assert set(CHALLENGE_DIRECTIONS) <= set(METRIC_BACKENDS)

    def test_unknown_metric_and_direction(self):
        """Test unknown names and directions are config errors"""
        with self.assertRaises(ConfigError):
            get_metric_backend('niqe')
        with self.assertRaises(ConfigError):
            MetricBackend('x', lambda p, g: 0.0, 'sideways')


class TestRanking(unittest.TestCase):
    """Tests for per-metric ranking and rank aggregation."""

    @staticmethod
    def test_competition_ranking():
        """Test ties share the best rank and the next rank is skipped"""
        assert per_metric_rank({'A': 0.5, 'B': 0.5, 'C': 0.4}, HIGHER_BETTER) == \
            {'A': 1, 'B': 1, 'C': 3}
        assert per_metric_rank({'A': 0.3, 'B': 0.1, 'C': 0.3}, LOWER_BETTER) == \
            {'A': 2, 'B': 1, 'C': 2}

    def test_rank_errors(self):
        """Test empty input, unknown directions and non-finite values"""
        with self.assertRaises(ConfigError):
            per_metric_rank({}, HIGHER_BETTER)
        with self.assertRaises(ConfigError):
            per_metric_rank({'A': 1.0}, 'best')
        with self.assertRaises(ConfigError):
            per_metric_rank({'A': 1.0, 'B': float('nan')}, HIGHER_BETTER)

    @staticmethod
    def test_challenge_replay():
        """Test the printed ranks reproduce all 17 final places and rank sums"""
        report = rank_report(challenge_records())
        assert report['rank_sums'] == RANK_SUMS
        final = {entry['team']: entry['final_rank'] for entry in report['final_ranking']}
        assert final == {team: row[3] for team, row in CHALLENGE_TABLE.items()}

    @staticmethod
    def test_ties_broken_by_params():
        """Test equal rank sums go to the team with fewer parameters"""
        final = aggregate_ranks(build_rank_table(challenge_records()),
                                {team: row[2] for team, row in CHALLENGE_TABLE.items()})
        order = [entry['team'] for entry in final]
        assert order.index('VARCHASVI_SVNIT') + 1 == order.index('Xie_Liu')
        assert order.index('sysu_701') + 1 == order.index('SYSU-FVL_ELLIE')

    @staticmethod
    def test_discrepancy_report():
        """Test supplied ranks that disagree with printed values are reported"""
        table = build_rank_table(challenge_records())
        assert len(table.discrepancies['ssim']) == 0
        lpips = table.discrepancies['lpips'].set_index('team')
        assert lpips.loc['S3', 'supplied_rank'] == 6 and lpips.loc['S3', 'derived_rank'] == 2
        assert lpips.loc['CVPR TCD', 'supplied_rank'] == 2
        assert lpips.loc['CVPR TCD', 'derived_rank'] == 5

    @staticmethod
    def test_derived_ssim_ranks():
        """Test ranks derived from the printed SSIM values match the table"""
        table = build_rank_table(challenge_records(with_ranks=False))
        assert table.discrepancies == {}
        expected = {team: row[0][0] for team, row in CHALLENGE_TABLE.items()}
        assert table.per_metric_ranks['ssim'] == expected

    @staticmethod
    def test_discrepancies_direct():
        """Test rank_discrepancies lists only disagreeing teams"""
        report = rank_discrepancies({'A': 0.9, 'B': 0.8}, {'A': 2, 'B': 2}, HIGHER_BETTER)
        assert list(report['team']) == ['A']

    @staticmethod
    def test_report_is_json_ready():
        """Test the rank report serializes to JSON"""
        report = json.loads(json.dumps(rank_report(challenge_records())))
        assert report['final_ranking'][0] == {'final_rank': 1, 'team': 'MiVideo',
                                              'rank_sum': 13, 'params': 927049}
        assert set(report['discrepancies']) >= {'lpips'}

    def test_missing_data(self):
        """Test missing teams, metrics and parameter counts are data errors"""
        table = RankTable({'SSIM': {'A': 1, 'B': 2}, 'PSNR': {'A': 1}},
                          {'SSIM': HIGHER_BETTER, 'PSNR': HIGHER_BETTER})
        with self.assertRaises(DataError) as ctx:
            table.rank_sums()
        assert "'B'" in str(ctx.exception) and 'PSNR' in str(ctx.exception)
        with self.assertRaises(DataError):
            aggregate_ranks({'SSIM': {'A': 1, 'B': 2}}, {'A': 10})
        with self.assertRaises(DataError):
            MetricRecord('A', {'SSIM': 0.5}, 0)
        with self.assertRaises(DataError):
            MetricRecord.from_dict({'team': 'A', 'params': 3})
        with self.assertRaises(DataError):
            build_rank_table([MetricRecord('A', {'SSIM': 0.5}, 3)])
        with self.assertRaises(DataError):
            build_rank_table([])

    @staticmethod
    def test_aggregate_accepts_dict():
        """Test aggregate_ranks takes a plain metric -> team -> rank dict"""
        final = aggregate_ranks({'m1': {'A': 1, 'B': 2}, 'm2': {'A': 2, 'B': 1}},
                                {'A': 20, 'B': 10})
        assert [e['team'] for e in final] == ['B', 'A']

    @staticmethod
    def test_record_round_trip_inf():
        """Test 'inf' strings in records load as infinity"""
        record = MetricRecord.from_dict({'team': 'A', 'values': {'PSNR': 'inf'}, 'params': 5})
        assert record.values['psnr'] == math.inf
        assert record.to_dict() == {'team': 'A', 'values': {'psnr': math.inf}, 'params': 5}

    @staticmethod
    def test_printed_names_match_backend_names():
        """Test records keyed by printed names rank under the default directions"""
        printed = ['SSIM', 'LPIPS', 'DISTS', 'LIQE', 'MUSIQ', 'Q-Align']
        records = [MetricRecord(team, dict(zip(printed, values)), params)
                   for team, (_, values, params, _) in CHALLENGE_TABLE.items()]
        assert rank_report(records)['rank_sums'] == \
            rank_report(challenge_records(with_ranks=False))['rank_sums']
        table = build_rank_table(records, {'Ssim': HIGHER_BETTER})
        assert list(table.per_metric_ranks) == ['ssim']

    def test_duplicate_metric_names(self):
        """Test two names for the same metric are a data error"""
        with self.assertRaises(DataError):
            MetricRecord('A', {'SSIM': 0.5, 'ssim': 0.6}, 3)


def write_pair_dirs(root, offsets):
    """Prediction and reference directories of 8-bit images; offsets maps a
    stem to the level offset of its prediction (None: no prediction)."""
    pred_dir, gt_dir = os.path.join(root, 'pred'), os.path.join(root, 'gt')
    os.makedirs(pred_dir)
    os.makedirs(gt_dir)
    levels = torch.arange(30, 30 + 3 * 16 * 16).remainder(200).float().view(3, 16, 16)
    for stem, offset in offsets.items():
        write_image(os.path.join(gt_dir, f'{stem}.png'), (levels + 30) / 255.0)
        if offset is not None:
            write_image(os.path.join(pred_dir, f'{stem}.png'), (levels + 30 + offset) / 255.0)
    return pred_dir, gt_dir


class TestEvaluateDirectory(unittest.TestCase):
    """Tests for directory-level evaluation."""

    @staticmethod
    def test_scores_and_outputs():
        """Test per-image scores, aggregates and written files"""
        with tempfile.TemporaryDirectory() as root:
            pred_dir, gt_dir = write_pair_dirs(root, {'a': 10, 'b': 10})
            prefix = os.path.join(root, 'scores')
            per_image, aggregate = evaluate_directory(pred_dir, gt_dir, ('psnr', 'ssim'),
                                                      team='T', params=1234,
                                                      output_prefix=prefix)
            expected = 20 * math.log10(255 / 10)
            assert len(per_image) == 4
            assert abs(aggregate['values']['psnr'] - expected) < 1e-3
            assert aggregate['team'] == 'T' and aggregate['images'] == 2
            assert aggregate['stubs'] == []
            written = pd.read_csv(f'{prefix}.csv')
            assert list(written.columns) == ['image', 'metric', 'value']
            with open(f'{prefix}.json') as f:
                assert json.load(f)['params'] == 1234

    @staticmethod
    def test_identical_images_report_inf():
        """Test identical pairs aggregate to an 'inf' PSNR"""
        with tempfile.TemporaryDirectory() as root:
            pred_dir, gt_dir = write_pair_dirs(root, {'a': 0})
            _, aggregate = evaluate_directory(pred_dir, gt_dir, ('psnr',))
            assert aggregate['values']['psnr'] == 'inf'
            assert aggregate['team'] == 'pred'

    @staticmethod
    def test_unmatched_warns():
        """Test references without predictions are skipped with a warning"""
        with tempfile.TemporaryDirectory() as root:
            pred_dir, gt_dir = write_pair_dirs(root, {'a': 5, 'b': None})
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter('always')
                per_image, aggregate = evaluate_directory(pred_dir, gt_dir, ('ssim', 'lpips'),
                                                          n_jobs=2)
            assert aggregate['images'] == 1
            assert aggregate['stubs'] == ['lpips']
            assert any('unmatched' in str(w.message) for w in caught)
            assert set(per_image['metric']) == {'ssim', 'lpips'}

    @staticmethod
    def test_aggregate_ranks_with_default_directions():
        """Test evaluation aggregates feed the ranking without naming directions"""
        printed = ('SSIM', 'LPIPS', 'DISTS', 'LIQE', 'MUSIQ', 'Q-Align')
        records = []
        with tempfile.TemporaryDirectory() as root:
            for team, offset in (('near', 2), ('far', 20)):
                pred_dir, gt_dir = write_pair_dirs(os.path.join(root, team), {'a': offset})
                with warnings.catch_warnings():
                    warnings.simplefilter('ignore')
                    _, aggregate = evaluate_directory(pred_dir, gt_dir, printed, team=team,
                                                      params=100)
                assert set(aggregate['values']) == set(CHALLENGE_DIRECTIONS)
                records.append(MetricRecord.from_dict(aggregate))
        report = rank_report(records)
        assert report['per_metric_ranks']['ssim'] == {'near': 1, 'far': 2}
        assert [e['team'] for e in report['final_ranking']] == ['near', 'far']

    def test_no_matches(self):
        """Test disjoint directories are a data error"""
        with tempfile.TemporaryDirectory() as root:
            pred_dir, gt_dir = write_pair_dirs(root, {'a': None})
            with self.assertRaises(DataError):
                evaluate_directory(pred_dir, gt_dir)
            with self.assertRaises(DataError):
                evaluate_directory(os.path.join(root, 'missing'), gt_dir)


if __name__ == '__main__':
    unittest.main()
