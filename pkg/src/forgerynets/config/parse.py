import configparser
import io
from pathlib import Path

import attr
from attr.validators import instance_of

from ..errors import ConfigurationError
from .data import DataConfig
from .eval import EvalConfig
from .model import ModelConfig
from .train import TrainConfig

# section name in config.ini -> (Config attribute, section class)
SECTIONS = {
    'DATA': ('data', DataConfig),
    'MODEL': ('model', ModelConfig),
    'TRAIN': ('train', TrainConfig),
    'EVAL': ('eval', EvalConfig),
}


def _format_value(value):
    return 'None' if value is None else str(value)


@attr.s
class Config:
    """class to represent all sections of config.ini file

    Attributes
    ----------
    data: DataConfig
        represents [DATA] section
    model: ModelConfig
        represents [MODEL] section
    train: TrainConfig
        represents [TRAIN] section
    eval: EvalConfig
        represents [EVAL] section
    """
    data = attr.ib(validator=instance_of(DataConfig), factory=DataConfig)
    model = attr.ib(validator=instance_of(ModelConfig), factory=ModelConfig)
    train = attr.ib(validator=instance_of(TrainConfig), factory=TrainConfig)
    eval = attr.ib(validator=instance_of(EvalConfig), factory=EvalConfig)

    def to_ini(self):
        """effective configuration as config.ini text; ``parse_config`` reads it back to an equal Config"""
        parser = configparser.ConfigParser(interpolation=None)
        for section, (name, cls) in SECTIONS.items():
            section_config = getattr(self, name)
            parser[section] = {
                field.name.upper(): _format_value(getattr(section_config, field.name))
                for field in attr.fields(cls)
            }
        buf = io.StringIO()
        parser.write(buf)
        return buf.getvalue()


def _section_kwargs(section, options, cls):
    valid = attr.fields_dict(cls)
    unknown = sorted(key for key in options if key.lower() not in valid)
    if unknown:
        raise ConfigurationError(
            f'unknown option(s) in [{section}] section: {unknown}. Valid options are: {sorted(valid)}'
        )
    return {key.lower(): value for key, value in options.items()}


def parse_config(config_fname=None, overrides=None):
    """parse config.ini file
    Uses ConfigParser from Python standard library.

    Parameters
    ----------
    config_fname : str, Path
        name of config.ini file. Default is None, in which case every option takes its default.
    overrides : dict
        section name -> {option: value}, e.g. from command-line flags.
        Values replace those in the file. Default is None.

    Returns
    -------
    config_obj : Config
        attrs-based class that represents all configuration parameters

    Raises
    ------
    ConfigurationError
        for unknown sections or options, and for invalid values
    """
    config = configparser.ConfigParser(inline_comment_prefixes=('#', ';'), interpolation=None)
    if config_fname is not None:
        config_fname = Path(config_fname)
        if not config_fname.is_file():
            raise FileNotFoundError(
                f'specified config.ini file not found: {config_fname}'
            )
        try:
            config.read(config_fname, encoding='utf-8')
        except configparser.Error as e:
            raise ConfigurationError(f'could not parse {config_fname}: {e}') from None

    unknown = sorted(section for section in config.sections() if section.upper() not in SECTIONS)
    if unknown:
        raise ConfigurationError(f'unknown section(s) in config file: {unknown}. Valid sections are: {list(SECTIONS)}')

    sections = {}
    for section in config.sections():
        options = dict(config[section])
        sections.setdefault(section.upper(), {}).update(options)

    if overrides:
        for section, options in overrides.items():
            if section.upper() not in SECTIONS:
                raise ConfigurationError(f'unknown section in overrides: {section}')
            options = {key.lower(): value for key, value in options.items() if value is not None}
            sections.setdefault(section.upper(), {}).update(options)

    kwargs = {}
    for section, (name, cls) in SECTIONS.items():
        options = sections.get(section, {})
        kwargs[name] = cls(**_section_kwargs(section, options, cls))
    return Config(**kwargs)
