""" Unit tests for the command line interface"""

# License: BSD 3 clause

import contextlib
import io
import json
import os
import tempfile
import unittest

import torch

from ellie import (cli, build_model, build_spec, Checkpoint, save_checkpoint, load_checkpoint,
                   make_synthetic_pairs)
from ellie.harness import write_pairs
from ellie.imageio import write_image


def run(*argv):
    """Run the command line and return (status, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        status = cli(list(argv))
    return status, out.getvalue(), err.getvalue()


class TestUsage(unittest.TestCase):
    """Tests for argument handling and exit status."""

    @staticmethod
    def test_unknown_subcommand():
        """Test an unknown subcommand exits with status 1."""
        status, _, err = run('sharpen')
        assert status == 1
        assert 'ellie: error' in err

    @staticmethod
    def test_missing_subcommand():
        """Test a missing subcommand exits with status 1."""
        assert run()[0] == 1

    @staticmethod
    def test_bad_override():
        """Test unknown config keys exit with status 1."""
        status, _, err = run('--set', 'train.stepz=3', 'audit', '--model', 'retinex_lite')
        assert status == 1
        assert 'train.stepz' in err

    @staticmethod
    def test_bad_threads():
        """Test a non-positive thread count exits with status 1."""
        assert run('--threads', '0', 'audit', '--model', 'retinex_lite')[0] == 1

    @staticmethod
    def test_missing_config_file():
        """Test an unreadable config file exits with status 1."""
        assert run('--config', '/nonexistent/run.cfg', 'audit', '--model', 'mobileie6')[0] == 1


class TestAudit(unittest.TestCase):
    """Tests for the audit subcommand."""

    @staticmethod
    def test_audit_passes():
        """Test a default zoo model passes the audit."""
        status, out, _ = run('audit', '--model', 'mobileie6')
        assert status == 0
        report = json.loads(out)
        assert report['passed']
        assert report['total_params'] == 98917

    @staticmethod
    def test_audit_fails_budget():
        """Test a model over the parameter budget exits with status 2."""
        status, out, err = run('--set', 'budget.max_params=50000', 'audit', '--model',
                               'mobileie6')
        assert status == 2
        assert not json.loads(out)['params_ok']
        assert err

    @staticmethod
    def test_audit_oversized_model():
        """Test a model with millions of parameters exits with status 2."""
        status, _, _ = run('--set', 'model.name=norm_unet', '--set', 'model.width=128',
                           '--set', 'model.max_params=100000000', 'audit', '--model',
                           'norm_unet')
        assert status == 2

    @staticmethod
    def test_audit_spec_file():
        """Test auditing a spec JSON file."""
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'spec.json')
            with open(path, 'w') as f:
                f.write(build_spec('retinex_lite').to_json())
            status, _, _ = run('audit', path)
            missing, _, _ = run('audit', os.path.join(tmp, 'missing.json'))
        assert status == 0
        assert missing == 2


class TestCommands(unittest.TestCase):
    """Tests for the train, enhance, evaluate, rank and reparam subcommands."""

    @staticmethod
    def test_train():
        """Test a short training run writes a loadable checkpoint."""
        with tempfile.TemporaryDirectory() as tmp:
            root = os.path.join(tmp, 'data')
            write_pairs(make_synthetic_pairs(count=2, size=48), root)
            ckpt_path = os.path.join(tmp, 'model.ckpt')
            status, out, _ = run('--seed', '1', '--set', 'train.steps=2', '--set',
                                 'train.patch=32', '--set', 'train.batch=1', 'train', root,
                                 '--out', ckpt_path, '--half', '--quiet')
            assert status == 0
            assert json.loads(out)['passed']
            ckpt = load_checkpoint(ckpt_path)
        assert ckpt.precision == 'float16'
        assert ckpt.step == 1

    @staticmethod
    def test_enhance():
        """Test every input image gets an enhanced output."""
        with tempfile.TemporaryDirectory() as tmp:
            ckpt_path = os.path.join(tmp, 'model.ckpt')
            save_checkpoint(Checkpoint.from_model(build_model('retinex_lite')), ckpt_path)
            in_dir, out_dir = os.path.join(tmp, 'in'), os.path.join(tmp, 'out')
            os.makedirs(in_dir)
            for name in ('a.png', 'b.jpg'):
                write_image(os.path.join(in_dir, name), torch.rand(3, 24, 20))
            status, _, _ = run('enhance', ckpt_path, in_dir, out_dir)
            assert status == 0
            assert sorted(os.listdir(out_dir)) == ['a.png', 'b.png']

    @staticmethod
    def test_enhance_empty_dir():
        """Test enhancing an empty directory exits with status 2."""
        with tempfile.TemporaryDirectory() as tmp:
            status, _, err = run('enhance', os.path.join(tmp, 'model.ckpt'), tmp,
                                 os.path.join(tmp, 'out'))
        assert status == 2
        assert 'no images' in err

    @staticmethod
    def test_enhance_corrupt_checkpoint():
        """Test a corrupt checkpoint exits with status 2."""
        with tempfile.TemporaryDirectory() as tmp:
            ckpt_path = os.path.join(tmp, 'model.ckpt')
            with open(ckpt_path, 'wb') as f:
                f.write(b'not a checkpoint at all')
            write_image(os.path.join(tmp, 'a.png'), torch.rand(3, 8, 8))
            status, _, _ = run('enhance', ckpt_path, tmp, os.path.join(tmp, 'out'))
        assert status == 2

    @staticmethod
    def test_evaluate():
        """Test evaluation writes the csv and json reports."""
        with tempfile.TemporaryDirectory() as tmp:
            pred_dir, gt_dir = os.path.join(tmp, 'pred'), os.path.join(tmp, 'gt')
            os.makedirs(pred_dir)
            os.makedirs(gt_dir)
            for name in ('a.png', 'b.png'):
                img = torch.rand(3, 16, 16)
                write_image(os.path.join(pred_dir, name), img)
                write_image(os.path.join(gt_dir, name), img)
            prefix = os.path.join(tmp, 'report')
            status, _, _ = run('evaluate', pred_dir, gt_dir, '--out', prefix,
                               '--metrics', 'psnr,ssim', '--team', 'smoke', '--params', '1000')
            assert status == 0
            assert os.path.exists(f'{prefix}.csv')
            assert os.path.exists(f'{prefix}.json')

    @staticmethod
    def test_rank():
        """Test ranking metric records from JSON files."""
        values = {'alpha': (0.9, 20.0), 'beta': (0.8, 22.0), 'gamma': (0.7, 18.0)}
        with tempfile.TemporaryDirectory() as tmp:
            paths = []
            for team, (ssim, psnr) in values.items():
                paths.append(os.path.join(tmp, f'{team}.json'))
                with open(paths[-1], 'w') as f:
                    json.dump({'team': team, 'values': {'ssim': ssim, 'psnr': psnr},
                               'params': 1000}, f)
            out_path = os.path.join(tmp, 'ranks.json')
            status, out, _ = run('rank', *paths, '--out', out_path, '--metrics',
                                 'ssim:higher_better,psnr:higher_better')
            with open(out_path) as f:
                report = json.load(f)
        assert status == 0
        assert [e['team'] for e in json.loads(out)] == ['alpha', 'beta', 'gamma']
        assert report['rank_sums'] == {'alpha': 3, 'beta': 3, 'gamma': 6}

    @staticmethod
    def test_evaluate_then_rank():
        """Test evaluation reports rank under the default challenge metrics."""
        with tempfile.TemporaryDirectory() as tmp:
            gt_dir = os.path.join(tmp, 'gt')
            os.makedirs(gt_dir)
            gt = torch.linspace(0.2, 0.8, 3 * 16 * 16).view(3, 16, 16)
            write_image(os.path.join(gt_dir, 'a.png'), gt)
            reports = []
            for team, noise in (('clean', 0.01), ('noisy', 0.2)):
                pred_dir = os.path.join(tmp, team)
                os.makedirs(pred_dir)
                noisy = gt + noise * torch.randn(3, 16, 16,
                                                 generator=torch.Generator().manual_seed(0))
                write_image(os.path.join(pred_dir, 'a.png'), noisy.clamp(0, 1))
                reports.append(os.path.join(tmp, f'{team}_report'))
                status, _, _ = run('evaluate', pred_dir, gt_dir, '--out', reports[-1],
                                   '--metrics', 'SSIM,LPIPS,DISTS,LIQE,MUSIQ,Q-Align',
                                   '--team', team, '--params', '1000')
                assert status == 0
            status, out, _ = run('rank', *(f'{r}.json' for r in reports), '--out',
                                 os.path.join(tmp, 'ranks.json'))
        assert status == 0
        assert [e['team'] for e in json.loads(out)] == ['clean', 'noisy']

    @staticmethod
    def test_rank_bad_metrics():
        """Test malformed metric directions exit with status 1."""
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'a.json')
            with open(path, 'w') as f:
                json.dump({'team': 'a', 'values': {'ssim': 0.5}, 'params': 10}, f)
            status, _, _ = run('rank', path, '--out', os.path.join(tmp, 'r.json'),
                               '--metrics', 'ssim')
        assert status == 1

    @staticmethod
    def test_reparam():
        """Test merging a checkpoint's multi-branch convolutions."""
        model = build_model('mobileie6')
        with tempfile.TemporaryDirectory() as tmp:
            in_path, out_path = os.path.join(tmp, 'train.ckpt'), os.path.join(tmp, 'fast.ckpt')
            save_checkpoint(Checkpoint.from_model(model), in_path)
            status, out, _ = run('reparam', in_path, out_path)
            merged = load_checkpoint(out_path)
        assert status == 0
        assert json.loads(out)['param_count'] == 60623
        assert merged.spec.reparam_nodes == ()
        x = torch.rand(1, 3, 24, 24)
        with torch.no_grad():
            assert torch.allclose(merged.build_model()(x), model.eval()(x), atol=1e-3)


if __name__ == '__main__':
    unittest.main()
