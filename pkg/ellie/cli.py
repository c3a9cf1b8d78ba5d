""" Command line interface: ``ellie <subcommand> ...``.

Exit status is 0 on success, 1 on usage or configuration errors and 2 on
data errors (missing or corrupt inputs, failed budget audits).
"""

# License: BSD 3 clause

import argparse
import dataclasses
import json
import os
import sys

import torch

from ellie.errors import EllieError, UsageError, ConfigError, DataError
from ellie.harness import (load_config, ingest_dataset, TrainRunner, load_checkpoint,
                           save_checkpoint, tiled_inference, Checkpoint)
from ellie.imageio import read_image, write_image, list_images
from ellie.metrics import (evaluate_directory, MetricRecord, rank_report, write_rank_report,
                           CHALLENGE_DIRECTIONS, DEFAULT_METRICS)
from ellie.reparam import reparameterize_model
from ellie.zoo import ModelSpec, audit_budget, build_spec

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class _ArgumentParser(argparse.ArgumentParser):

    def error(self, message):
        raise UsageError(f'{message}\n{self.format_usage()}')


def _parser():
    parser = _ArgumentParser(prog='ellie', description='Efficient low-light image enhancement.')
    parser.add_argument('--config', help='flat key = value config file')
    parser.add_argument('--seed', type=int, help='overrides train.seed')
    parser.add_argument('--threads', type=int, help='torch intra-op threads')
    parser.add_argument('--set', action='append', default=[], metavar='KEY=VALUE',
                        help='config override, repeatable')
    sub = parser.add_subparsers(dest='command', parser_class=_ArgumentParser)

    p = sub.add_parser('train', help='train a zoo model on a paired dataset')
    p.add_argument('data_root')
    p.add_argument('--out', required=True, help='checkpoint file')
    p.add_argument('--experiment', default='ellie')
    p.add_argument('--output-dir', help='directory for run statistics')
    p.add_argument('--half', action='store_true', help='store weights as float16')
    p.add_argument('--quiet', action='store_true')

    p = sub.add_parser('enhance', help='enhance every image in a directory')
    p.add_argument('checkpoint')
    p.add_argument('in_dir')
    p.add_argument('out_dir')

    p = sub.add_parser('evaluate', help='score predictions against references')
    p.add_argument('pred_dir')
    p.add_argument('gt_dir')
    p.add_argument('--out', required=True, help='report prefix (.csv and .json)')
    p.add_argument('--metrics', default=','.join(DEFAULT_METRICS))
    p.add_argument('--team')
    p.add_argument('--params', type=int)
    p.add_argument('--jobs', type=int, default=1)

    p = sub.add_parser('rank', help='aggregate metric records into a rank table')
    p.add_argument('records', nargs='+', help='MetricRecord JSON files')
    p.add_argument('--out', required=True)
    p.add_argument('--metrics', help='comma separated metric:direction pairs')

    p = sub.add_parser('audit', help='check a model against the size budget')
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument('--model', help='zoo model name')
    group.add_argument('spec', nargs='?', help='ModelSpec JSON file')

    p = sub.add_parser('reparam', help='merge multi-branch convolutions of a checkpoint')
    p.add_argument('in_checkpoint')
    p.add_argument('out_checkpoint')
    p.add_argument('--half', action='store_true')
    return parser


def _overrides(args):
    items = list(args.set)
    if args.seed is not None:
        items.append(('train.seed', args.seed))
    return items


def _print_json(obj):
    print(json.dumps(obj, indent=2, default=str))


def _cmd_train(args, config):
    precision = 'float16' if args.half else 'float32'
    budget = dataclasses.replace(config.budget, precision=precision)
    manifest = ingest_dataset(args.data_root)
    runner = TrainRunner(config.train, manifest, args.experiment,
                         output_directory=args.output_dir, checkpoint_precision=precision,
                         budget=budget, verbose=not args.quiet)
    runner.run()
    report = save_checkpoint(runner.checkpoint, args.out, budget)
    _print_json(report)
    return EXIT_OK


def _cmd_enhance(args, config):
    names = list_images(args.in_dir)
    if not names:
        raise DataError(f"""no images in '{args.in_dir}'.""")
    model = load_checkpoint(args.checkpoint).build_model()
    os.makedirs(args.out_dir, exist_ok=True)
    tiling = config.tiling
    for name in names:
        out = tiled_inference(model, read_image(os.path.join(args.in_dir, name)),
                              tiling.tile, tiling.overlap, tiling.mode)
        write_image(os.path.join(args.out_dir, os.path.splitext(name)[0] + '.png'), out)
        print(f'Saving: [{os.path.join(args.out_dir, name)}]')
    return EXIT_OK


def _cmd_evaluate(args, config):
    metrics = [m.strip() for m in args.metrics.split(',') if m.strip()]
    _, aggregate = evaluate_directory(args.pred_dir, args.gt_dir, metrics, args.team,
                                      args.params, args.jobs, args.out)
    _print_json(aggregate)
    return EXIT_OK


def _load_record(path):
    try:
        with open(path) as f:
            return MetricRecord.from_dict(json.load(f))
    except (OSError, ValueError) as e:
        raise DataError(f"""cannot read metric record '{path}': {e}""") from e


def _cmd_rank(args, config):
    directions = CHALLENGE_DIRECTIONS
    if args.metrics:
        try:
            directions = dict(item.split(':') for item in args.metrics.split(','))
        except ValueError:
            raise UsageError("""--metrics expects metric:direction pairs.""") from None
    report = rank_report([_load_record(p) for p in args.records], directions)
    write_rank_report(report, args.out)
    _print_json(report['final_ranking'])
    return EXIT_OK


def _cmd_audit(args, config):
    if args.model:
        spec = build_spec(args.model, config.train.model_cfg if args.model == config.train.model
                          else None)
    else:
        try:
            with open(args.spec) as f:
                spec = ModelSpec.from_json(f.read())
        except OSError as e:
            raise DataError(f"""cannot read spec '{args.spec}': {e}""") from e
    report = audit_budget(spec, config.budget)
    _print_json({k: v for k, v in report.to_dict().items() if k != 'per_node'})
    for message in report.messages:
        print(message, file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_DATA


def _cmd_reparam(args, config):
    ckpt = load_checkpoint(args.in_checkpoint)
    model = reparameterize_model(ckpt.build_model())
    precision = 'float16' if args.half else ckpt.precision
    out = Checkpoint.from_model(model, ckpt.step, precision)
    budget = dataclasses.replace(config.budget, precision=precision)
    _print_json(save_checkpoint(out, args.out_checkpoint, budget))
    return EXIT_OK


_COMMANDS = {'train': _cmd_train, 'enhance': _cmd_enhance, 'evaluate': _cmd_evaluate,
             'rank': _cmd_rank, 'audit': _cmd_audit, 'reparam': _cmd_reparam}


def cli(argv=None):
    """Run the command line and return the exit status."""
    parser = _parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage())
        if args.threads is not None:
            if args.threads < 1:
                raise UsageError("""--threads must be at least 1.""")
            torch.set_num_threads(args.threads)
        config = load_config(args.config, _overrides(args))
        return _COMMANDS[args.command](args, config)
    except (UsageError, ConfigError) as e:
        print(f'ellie: error: {e}', file=sys.stderr)
        return EXIT_USAGE
    except EllieError as e:
        print(f'ellie: error: {e}', file=sys.stderr)
        return EXIT_DATA
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_OK


def main():
    sys.exit(cli())
