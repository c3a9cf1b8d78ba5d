import time

from ellie.decorators import short_name
from ellie.harness.checkpoint import save_checkpoint
from ellie.harness.runners._runner_base import _RunnerBase
from ellie.harness.runners.utils import build_data_filename
from ellie.harness.train import train

"""
Example usage:

    cfg = load_config('retinex.cfg').train
    manifest = ingest_dataset('data/lol')

    runner = TrainRunner(cfg=cfg,
                         data=manifest,
                         experiment_name='retinex_kletech',
                         output_directory=OUTPUT_DIRECTORY)

    # the two data frames will contain the results
    df_run_stats, df_run_curves = runner.run()
    runner.checkpoint  # selected weights
"""


@short_name('train')
class TrainRunner(_RunnerBase):

    def __init__(self, cfg, data, experiment_name, val_data=None, output_directory=None,
                 checkpoint_precision='float32', budget=None, n_jobs=1, schedule=None,
                 **kwargs):
        super().__init__(experiment_name=experiment_name, seed=cfg.seed,
                         output_directory=output_directory, log_every=cfg.log_every, **kwargs)
        self.cfg = cfg
        self.data = data
        self.val_data = val_data
        self.checkpoint_precision = checkpoint_precision
        self.budget = budget
        self.n_jobs = n_jobs
        self.schedule = cfg.make_schedule() if schedule is None else schedule
        self.checkpoint = None
        self.save_report = None

    def run(self):
        self._setup()
        args = f'model:[{self.cfg.model}], loss:[{self.cfg.loss.preset or "custom"}], ' \
               f'steps:[{self.cfg.steps}], seed:[{self.seed}]'
        if self.verbose:
            self._print_banner(f'*** Run START - {args}')
        run_start = time.perf_counter()

        self.checkpoint, log = train(self.cfg, self.data, self.val_data,
                                     callback=self._on_step, n_jobs=self.n_jobs,
                                     schedule=self.schedule)
        self.checkpoint.precision = self.checkpoint_precision

        if self.verbose:
            self._print_banner(f'*** Run END - {args}')
        self._print(f'Run time: {time.perf_counter() - run_start}')

        self._create_and_save_run_data_frames(extra_data_frames={'train_log_df': log})
        if self._output_directory is not None:
            path = build_data_filename(self._output_directory, self.runner_name(),
                                       self._experiment_name, 'checkpoint', ext='ckpt')
            self.save_report = save_checkpoint(self.checkpoint, path, self.budget)
            self._print(f'Saving: [{path}]')
        return self.run_stats_df, self.curves_df

    def _on_step(self, step, loss, breakdown, lr, done):
        info = getattr(self.schedule, 'get_info__', None)
        self._save_state(step, loss, breakdown, lr, done,
                         extra_info=info(step) if info is not None else None)
