""" Output file naming for runners."""

# License: BSD 3 clause

import os
import re

_UNSAFE = re.compile(r'[^A-Za-z0-9._-]+')


def safe_name(name):
    """:code:`name` with runs of characters unsafe in file names replaced by
    '_', e.g. team names such as 'CVPR TCD'."""
    return _UNSAFE.sub('_', str(name)).strip('_') or '_'


def build_data_filename(output_directory, runner_name, experiment_name, df_name, ext=''):
    """Path :code:`<output_directory>/<experiment>/<runner>__<experiment>__<df_name><ext>`;
    the experiment directory is created."""
    experiment_name = safe_name(experiment_name)
    directory = os.path.join(output_directory, experiment_name)
    os.makedirs(directory, exist_ok=True)

    if ext and not ext.startswith('.'):
        ext = f'.{ext}'
    return os.path.join(directory, f'{runner_name.lower()}__{experiment_name}__{df_name}{ext}')
