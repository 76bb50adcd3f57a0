"""evaluate a trained detector on the test split and write reports"""
import logging
from pathlib import Path

from .data import load_split, make_dataset
from .engine import Tester
from .nets import ForgeryDetector
from .transforms.functional import Distortion
from .utils.general import make_save_path, phase2_ckpt_path

logger = logging.getLogger(__name__)


def write_report(metrics, results_path, name, report='text'):
    """write ``metrics`` as ``{name}.txt`` or ``{name}.csv`` in ``results_path``

    The csv holds one row per family with acc, ap and the mean router distribution,
    the text report is the same table formatted for reading.

    Returns
    -------
    report_path : Path
    """
    results_path = make_save_path(results_path)
    if report == 'csv':
        report_path = results_path.joinpath(f'{name}.csv')
        metrics.to_frame().to_csv(report_path, index=False)
    elif report == 'text':
        report_path = results_path.joinpath(f'{name}.txt')
        report_path.write_text(metrics.to_text() + '\n', encoding='utf-8')
    else:
        raise ValueError(f"invalid report: {report}. Must be one of {{'text', 'csv'}}")
    logger.info('wrote report to %s', report_path)
    return report_path


def evaluate_model(model, config, test_samples, distortion=None, dump_features=None, restore_path=None):
    """Metrics of ``model`` on ``test_samples``, with ``distortion`` applied on the fly"""
    testset = make_dataset(test_samples, 'test', config.data,
                           align=config.model.npr_factor,
                           distortion=distortion)
    tester = Tester(model, testset,
                    restore_path=restore_path,
                    batch_size=config.eval.batch_size,
                    device=config.train.device)
    return tester.test(dump_features=dump_features)


def evaluate(config):
    """measure accuracy and average precision of a trained detector, overall and per family

    Uses the [EVAL] section: the checkpoint defaults to the phase-2 checkpoint under
    ``[TRAIN] SAVE_PATH``, reports go next to the checkpoint unless ``results_path`` is set.

    Returns
    -------
    metrics : forgerynets.utils.metrics.Metrics
    report_path : Path
    """
    eval_config = config.eval
    # read the data first, so a broken dataset file is reported before anything is built
    test_samples = load_split(config.data, 'test', image_size=config.model.image_size)

    ckpt_path = eval_config.ckpt_path
    if ckpt_path is None:
        ckpt_path = phase2_ckpt_path(config.train.save_path)
    ckpt_path = Path(ckpt_path)
    if not ckpt_path.is_file():
        raise FileNotFoundError(f'checkpoint not found: {ckpt_path}')

    model = ForgeryDetector.from_config(config.model)
    metrics = evaluate_model(model, config, test_samples,
                             distortion=eval_config.distortion,
                             dump_features=eval_config.dump_features,
                             restore_path=ckpt_path)

    results_path = eval_config.results_path or ckpt_path.parent
    distortion = Distortion.from_str(eval_config.distortion).value
    report_path = write_report(metrics, results_path, f'eval_{distortion}', report=eval_config.report)
    return metrics, report_path
