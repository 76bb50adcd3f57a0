"""logging configuration for command-line runs"""
import logging
from pathlib import Path

LOGGER_NAME = 'forgerynets'
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
RUN_LOG = 'run.log'


def config_logging(save_path=None, level='INFO'):
    """attach a console handler to the package logger and,
    if ``save_path`` is an existing directory, a file handler writing ``run.log`` there

    Calling it again replaces the handlers, so repeated runs in one process do not duplicate messages.

    Returns
    -------
    logger : logging.Logger
    """
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(level)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    formatter = logging.Formatter(LOG_FORMAT)
    console = logging.StreamHandler()
    console.setFormatter(formatter)
    logger.addHandler(console)

    if save_path is not None and Path(save_path).is_dir():
        file_handler = logging.FileHandler(Path(save_path).joinpath(RUN_LOG), encoding='utf-8')
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)
    return logger


def log_config(logger, config):
    """echo the effective configuration verbatim"""
    logger.info('effective configuration:\n%s', config.to_ini())
