"""
Invokes __main__ when the module is run as a script.
Example: python -m forgerynets --help
The package is installed on the path by pip, so typing
`$ forgerynets --help` would have the same effect (i.e., no need
to type the python -m)
"""
import argparse
import logging
import sys
from pathlib import Path

from .ablate import ablate
from .analysis import probe_matrix
from .baseline import BASELINES, baseline
from .config import parse_config
from .data import extract, gen_data, load_split
from .errors import ConfigurationError, DataError, FormatError, ForgeryNetsError, NumericalError
from .evaluate import evaluate
from .gradcheck import DIMS, EPS, gradcheck
from .train import train
from .utils.general import make_save_path
from .utils.logging import config_logging, log_config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3

CONFIG_ECHO = 'config.ini'


class UsageError(Exception):
    """bad command line"""


class ArgumentParser(argparse.ArgumentParser):
    """raises UsageError instead of exiting, so ``dispatch`` decides the exit code"""
    def error(self, message):
        raise UsageError(f'{self.format_usage()}{self.prog}: error: {message}')


def _split_list(value):
    return [item.strip() for item in value.split(',') if item.strip()]


def _start_run(config, out_dir):
    """make ``out_dir``, attach the run log there, echo the effective config to the log and to ``config.ini``"""
    out_dir = make_save_path(out_dir)
    config_logging(out_dir)
    log_config(logger, config)
    out_dir.joinpath(CONFIG_ECHO).write_text(config.to_ini(), encoding='utf-8')
    return out_dir


def _call_gen_data(args, config):
    out = Path(args.out)
    config_logging(out.parent if out.parent.is_dir() else None)
    log_config(logger, config)
    data_config = config.data
    samples = gen_data(out,
                       seed=data_config.seed,
                       n_real=data_config.n_real,
                       n_fake=data_config.n_fake,
                       families=data_config.families,
                       image_size=config.model.image_size,
                       distortion=data_config.distortion_config(),
                       n_jobs=data_config.n_jobs,
                       **data_config.trace_kwargs())
    print(f'wrote {len(samples)} samples to {out}')


def _call_extract(args, config):
    out = Path(args.out)
    config_logging(out.parent if out.parent.is_dir() else None)
    log_config(logger, config)
    model_config = config.model
    samples = extract(args.data, out,
                      kinds=model_config.kinds,
                      npr_factor=model_config.npr_factor,
                      hpr_sigma=model_config.hpr_sigma,
                      srm_kernels=model_config.srm_kernels)
    print(f'wrote {len(samples)} samples with kinds {model_config.kinds} to {out}')


def _call_train(args, config):
    _start_run(config, config.train.save_path)
    save_paths = train(config)
    print(f'trained phase {config.train.phase}, results in {[str(path) for path in save_paths]}')


def _call_eval(args, config):
    if config.eval.results_path is not None:
        _start_run(config, config.eval.results_path)
    else:
        config_logging()
        log_config(logger, config)
    metrics, report_path = evaluate(config)
    print(metrics.to_text())
    print(f'report written to {report_path}')


def _call_ablate(args, config):
    out_dir = _start_run(config, config.train.save_path)
    df = ablate(config, disable=args.disable, replicates=args.replicates,
                kinds_sweep=args.kinds_sweep, results_path=out_dir)
    print(df.to_string(index=False))


def _call_baseline(args, config):
    out_dir = _start_run(config, config.train.save_path)
    df = baseline(config, args.kind, results_path=out_dir)
    print(df.to_string(index=False))


def _call_gradcheck(args, config):
    config_logging()
    df = gradcheck(dims=args.dims, seed=config.train.seed, eps=args.eps, n_points=args.n_points)
    print(df.to_string(index=False))
    print(f'max rel err: {df["max_rel_err"].max():.3e}')


def _call_probe(args, config):
    out_dir = _start_run(config, config.train.save_path)
    train_samples = load_split(config.data, 'train', image_size=config.model.image_size)
    test_samples = load_split(config.data, 'test', image_size=config.model.image_size)
    df = probe_matrix(train_samples, test_samples, config.model.kinds,
                      npr_factor=config.model.npr_factor,
                      hpr_sigma=config.model.hpr_sigma,
                      srm_kernels=config.model.srm_kernels,
                      seed=config.data.seed)
    df.to_csv(out_dir.joinpath('probe.csv'))
    print(df.to_string())


COMMANDS = {
    'gen-data': _call_gen_data,
    'extract': _call_extract,
    'train': _call_train,
    'eval': _call_eval,
    'ablate': _call_ablate,
    'baseline': _call_baseline,
    'gradcheck': _call_gradcheck,
    'probe': _call_probe,
}


def get_parser():
    parser = ArgumentParser(prog='forgerynets',
                            description='forgerynets command line interface',
                            formatter_class=argparse.RawTextHelpFormatter)
    subparsers = parser.add_subparsers(dest='command', metavar='command',
                                       parser_class=ArgumentParser)
    subparsers.required = True

    def add_command(name, help):
        sub = subparsers.add_parser(name, help=help, formatter_class=argparse.RawTextHelpFormatter)
        sub.add_argument('--config', help='config.ini file, flags override its values')
        sub.add_argument('--seed', type=int, help='seeds every random number generator')
        return sub

    sub = add_command('gen-data', 'generate a split of the synthetic forgery corpus\n'
                                  '$ forgerynets gen-data --out train.alds --families UP')
    sub.add_argument('--out', required=True, help='dataset file to write')
    sub.add_argument('--n-real', type=int)
    sub.add_argument('--n-fake', type=int, help='fakes per family')
    sub.add_argument('--families', type=_split_list, help='comma-separated, from UP, HF, CB')
    sub.add_argument('--size', type=int, help='image side')
    sub.add_argument('--distort', choices=['none', 'blur', 'down', 'jpeg'])
    sub.add_argument('--n-jobs', type=int)

    sub = add_command('extract', 'write the low-level planes of a dataset file')
    sub.add_argument('--data', required=True, help='RGB dataset file to read')
    sub.add_argument('--out', required=True, help='dataset file to write')
    sub.add_argument('--kinds', type=_split_list, help='comma-separated extractor kinds, image included')
    sub.add_argument('--npr-factor', type=int)
    sub.add_argument('--hpr-sigma', type=float)

    sub = add_command('train', 'train phase 1 or phase 2\n'
                               '$ forgerynets train --config config.ini --phase 1 --modality all')
    sub.add_argument('--phase', type=int, choices=[1, 2])
    sub.add_argument('--modality', help="stream name, 'encoder' or 'all'")
    sub.add_argument('--resume', help='checkpoint to resume from')
    sub.add_argument('--out', help='directory for checkpoints, logs and reports')
    sub.add_argument('--data', help='training dataset file')
    sub.add_argument('--epochs', type=int)
    sub.add_argument('--moe-sign', choices=['literal', 'balance'])
    sub.add_argument('--moe-lambda', type=float)
    sub.add_argument('--replicates', type=int)

    sub = add_command('eval', 'evaluate a trained detector on the test split')
    sub.add_argument('--ckpt', help='checkpoint, default is the phase-2 checkpoint of [TRAIN] SAVE_PATH')
    sub.add_argument('--data', help='test dataset file')
    sub.add_argument('--report', choices=['text', 'csv'])
    sub.add_argument('--distort', choices=['none', 'blur', 'down', 'jpeg'])
    sub.add_argument('--dump-features', help='write CLS features, routing and scores here')
    sub.add_argument('--out', help='directory for reports')

    sub = add_command('ablate', 'train and evaluate the model with components removed')
    sub.add_argument('--disable', action='append',
                     help='comma-separated components from le, cla, liia, dfs; repeat to add combinations')
    sub.add_argument('--replicates', type=int)
    sub.add_argument('--kinds-sweep', action='store_true',
                     help='compare prefixes of the low-level kinds instead of components')
    sub.add_argument('--out', help='directory for checkpoints and reports')

    sub = add_command('baseline', 'train and evaluate a simple fusion baseline')
    sub.add_argument('--kind', required=True, choices=list(BASELINES))
    sub.add_argument('--replicates', type=int)
    sub.add_argument('--out', help='directory for checkpoints and reports')

    sub = add_command('gradcheck', 'finite-difference check of every gradient in 64 bit')
    sub.add_argument('--dims', choices=list(DIMS), default='tiny')
    sub.add_argument('--eps', type=float, default=EPS)
    sub.add_argument('--n-points', type=int, help='coordinates checked per tensor, default is all')

    sub = add_command('probe', 'linear probe of each extractor per forgery family')
    sub.add_argument('--out', help='directory for the report')
    return parser


def _overrides(args):
    """section -> {option: value} from the flags that were given"""
    flags = vars(args)

    def pick(*names):
        return {option: flags.get(flag) for flag, option in names if flags.get(flag) is not None}

    command = args.command
    overrides = {'DATA': {}, 'MODEL': {}, 'TRAIN': {}, 'EVAL': {}}
    # --seed drives both the generated splits and training
    overrides['DATA'].update(pick(('seed', 'seed')))
    overrides['TRAIN'].update(pick(('seed', 'seed')))
    if command == 'gen-data':
        overrides['DATA'].update(pick(('n_real', 'n_real'), ('n_fake', 'n_fake'),
                                      ('families', 'families'), ('distort', 'distortion'), ('n_jobs', 'n_jobs')))
        overrides['MODEL'].update(pick(('size', 'image_size')))
    elif command == 'extract':
        overrides['MODEL'].update(pick(('kinds', 'kinds'), ('npr_factor', 'npr_factor'), ('hpr_sigma', 'hpr_sigma')))
    elif command == 'train':
        overrides['DATA'].update(pick(('data', 'train_path')))
        overrides['TRAIN'].update(pick(('phase', 'phase'), ('modality', 'modality'), ('resume', 'resume'),
                                       ('out', 'save_path'), ('epochs', 'epochs'), ('moe_sign', 'moe_sign'),
                                       ('moe_lambda', 'moe_lambda'), ('replicates', 'replicates')))
    elif command == 'eval':
        overrides['DATA'].update(pick(('data', 'test_path')))
        overrides['EVAL'].update(pick(('ckpt', 'ckpt_path'), ('report', 'report'), ('distort', 'distortion'),
                                      ('dump_features', 'dump_features'), ('out', 'results_path')))
    elif command in ('ablate', 'baseline', 'probe'):
        overrides['TRAIN'].update(pick(('out', 'save_path'), ('replicates', 'replicates')))
    return overrides


def exit_code(err):
    """exit code for an exception raised by a command"""
    if isinstance(err, (UsageError, ConfigurationError)):
        return EXIT_USAGE
    if isinstance(err, (FormatError, DataError, FileNotFoundError)):
        return EXIT_DATA
    if isinstance(err, NumericalError):
        return EXIT_NUMERICAL
    return EXIT_USAGE


def dispatch(argv=None):
    """command-line interface
    Called by main() when user runs from the command-line by typing 'forgerynets'

    Parameters
    ----------
    argv : list
        of str, command-line arguments without the program name.
        Default is None, in which case ``sys.argv[1:]`` is used.

    Returns
    -------
    code : int
        0 on success, 1 on a usage or configuration error, 2 on a data or
        format error, 3 on a numerical failure

    Notes
    -----
    This function is not really meant to be run by the user, but has its own arguments
    to make it easier to test (instead of throwing everything into one 'main' function)
    """
    parser = get_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as err:
        print(err, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as err:  # --help
        return err.code if isinstance(err.code, int) else EXIT_OK

    try:
        config = parse_config(args.config, overrides=_overrides(args))
        COMMANDS[args.command](args, config)
    except (UsageError, ForgeryNetsError, FileNotFoundError) as err:
        logger.error('%s: %s', type(err).__name__, err)
        print(f'forgerynets {args.command}: {type(err).__name__}: {err}', file=sys.stderr)
        return exit_code(err)
    return EXIT_OK


def main():
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == '__main__':
    main()
