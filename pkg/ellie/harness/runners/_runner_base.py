from abc import ABC, abstractmethod
import os
import pickle as pk
import time

import pandas as pd

from ellie.decorators import get_short_name
from ellie.harness.runners.utils import build_data_filename


class _RunnerBase(ABC):

    @classmethod
    def runner_name(cls):
        return get_short_name(cls)

    @staticmethod
    def _print_banner(text):
        print('*' * len(text))
        print(text)
        print('*' * len(text))

    @abstractmethod
    def run(self):
        pass

    def __init__(self, experiment_name, seed, output_directory=None, log_every=50,
                 generate_curves=True, verbose=True):
        self.seed = seed
        self.log_every = log_every
        self.generate_curves = generate_curves
        self.verbose = verbose

        self.run_stats_df = None
        self.curves_df = None
        self._raw_run_stats = []
        self._loss_curves = []
        self._output_directory = output_directory
        self._experiment_name = experiment_name
        self._run_start_time = None

    def _setup(self):
        self._raw_run_stats = []
        self._loss_curves = []
        if self._output_directory is not None:
            os.makedirs(self._output_directory, exist_ok=True)
        self._run_start_time = time.perf_counter()

    def _print(self, text):
        if self.verbose:
            print(text)

    def _save_state(self, step, loss, breakdown, lr, done=False, extra_info=None):
        t = time.perf_counter() - self._run_start_time
        if self.generate_curves:
            self._loss_curves.append({'Step': step, 'Time': t, 'Loss': loss, 'LR': lr, **breakdown})

        if step % self.log_every and not done:
            return
        self._print(f'runner_name:[{self.runner_name()}], '
                    f'experiment_name:[{self._experiment_name}], '
                    f'step:[{step}], done:[{done}], time:[{t:.2f}], loss:[{loss:.4f}]')
        self._print('\t' + ', '.join(f'{n}:[{v:.4f}]' for n, v in breakdown.items()))
        self._print('')

        run_stat = {'Step': step, 'Loss': loss, 'Time': t, 'LR': lr, **breakdown}
        if extra_info:
            run_stat.update(extra_info)
        self._raw_run_stats.append(run_stat)

    def _create_and_save_run_data_frames(self, extra_data_frames=None):
        self.run_stats_df = pd.DataFrame(self._raw_run_stats)
        self.curves_df = pd.DataFrame(self._loss_curves)
        if self._output_directory is not None:
            self._dump_df_to_disk(self.run_stats_df, df_name='run_stats_df')
            if self.generate_curves:
                self._dump_df_to_disk(self.curves_df, df_name='curves_df')
            if isinstance(extra_data_frames, dict):
                for n, v in extra_data_frames.items():
                    self._dump_df_to_disk(v, df_name=n)

    def _dump_df_to_disk(self, df, df_name):
        filename_root = self._dump_pickle_to_disk(object_to_pickle=df, name=df_name)
        df.to_csv(f'{filename_root}.csv')
        self._print(f'Saving: [{filename_root}.csv]')

    def _dump_pickle_to_disk(self, object_to_pickle, name):
        if self._output_directory is None:
            return
        filename_root = build_data_filename(output_directory=self._output_directory,
                                            runner_name=self.runner_name(),
                                            experiment_name=self._experiment_name,
                                            df_name=name)
        with open(f'{filename_root}.p', 'wb') as f:
            pk.dump(object_to_pickle, f)
        self._print(f'Saving: [{filename_root}.p]')
        return filename_root
