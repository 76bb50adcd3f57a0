"""convert the loss summaries written during training into tables"""
from pathlib import Path

import pandas as pd
from tensorboard.backend.event_processing.event_accumulator import EventAccumulator

from .errors import DataError


def logdir2df(logdir):
    """scalars of the events file in ``logdir`` as a pandas DataFrame

    Parameters
    ----------
    logdir : str, Path
        directory containing the tfevents file written by a SummaryWriter

    Returns
    -------
    df : pandas.DataFrame
        indexed by step, one column per scalar tag, e.g. 'loss/train'
    """
    ea = EventAccumulator(path=str(logdir))
    ea.Reload()  # load all data written so far

    columns = []
    for tag in ea.Tags()['scalars']:
        events = ea.Scalars(tag)
        columns.append(
            pd.Series([event.value for event in events],
                      index=pd.Index([event.step for event in events], name='step'),
                      name=tag)
        )
    if not columns:
        return pd.DataFrame(index=pd.Index([], name='step'))
    return pd.concat(columns, axis=1)


def logdir2csv(logdir):
    """write the scalars of the events files in ``logdir`` next to them,
    named after the newest events file, ``{events file}.csv``

    Returns
    -------
    csv_path : Path
    """
    logdir = Path(logdir)
    events_files = [path for path in sorted(logdir.glob('*tfevents*')) if path.suffix != '.csv']
    if not events_files:
        raise DataError(f'did not find any events files in {logdir}')
    # file names start with the creation time
    csv_path = logdir.joinpath(events_files[-1].name + '.csv')
    logdir2df(logdir).to_csv(csv_path)
    return csv_path
