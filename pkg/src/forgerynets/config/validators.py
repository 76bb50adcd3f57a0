"""converters and validators shared by the config classes

Converters accept both the raw strings read from a config.ini file
and already typed values passed as command-line overrides.
"""
import ast
import configparser
from pathlib import Path

from ..errors import ConfigurationError


def _is_none(value):
    return value is None or (isinstance(value, str) and value.strip() in ('', 'None', 'none'))


def optional(converter):
    def convert(value):
        if _is_none(value):
            return None
        return converter(value)
    return convert


def to_int(value):
    try:
        if isinstance(value, float) and not value.is_integer():
            raise ValueError
        return int(value)
    except (TypeError, ValueError):
        raise ConfigurationError(f'expected an integer, got {value!r}') from None


def to_float(value):
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigurationError(f'expected a number, got {value!r}') from None


def to_bool(value):
    if isinstance(value, bool):
        return value
    try:
        return configparser.ConfigParser.BOOLEAN_STATES[str(value).strip().lower()]
    except KeyError:
        raise ConfigurationError(f'expected a boolean, got {value!r}') from None


def to_list(value):
    """'[1, 2]' or 'a, b' -> list"""
    if isinstance(value, str):
        text = value.strip()
        if text.startswith(('[', '(')):
            try:
                value = ast.literal_eval(text)
            except (ValueError, SyntaxError):
                raise ConfigurationError(f'could not parse list: {value!r}') from None
        elif text == '':
            value = []
        else:
            value = [item.strip() for item in text.split(',') if item.strip()]
    if isinstance(value, (str, int, float)):
        value = [value]
    return list(value)


def to_int_list(value):
    """'[16, 32]' or '16, 32' -> [16, 32]"""
    return [to_int(item) for item in to_list(value)]


def to_float_list(value):
    return [to_float(item) for item in to_list(value)]


def to_str(value):
    return str(value).strip()


def to_path(value):
    return Path(str(value).strip()).expanduser()


def is_pos_int(instance, attribute, value):
    if type(value) != int:
        raise ConfigurationError(f'type of {attribute.name} must be an int')
    if value < 1:
        raise ConfigurationError(f'{attribute.name} must be a positive integer, but was: {value}')


def is_non_neg_int(instance, attribute, value):
    if type(value) != int:
        raise ConfigurationError(f'type of {attribute.name} must be an int')
    if value < 0:
        raise ConfigurationError(f'{attribute.name} must be a non-negative integer, but was: {value}')


def is_pos(instance, attribute, value):
    if value <= 0:
        raise ConfigurationError(f'{attribute.name} must be positive, but was: {value}')


def is_non_neg(instance, attribute, value):
    if value < 0:
        raise ConfigurationError(f'{attribute.name} must be non-negative, but was: {value}')


def is_ratio(instance, attribute, value):
    if not 0. < value < 1.:
        raise ConfigurationError(f'{attribute.name} must lie strictly between 0 and 1, but was: {value}')


def is_list_of_int(instance, attribute, value):
    for ind, item in enumerate(value):
        if type(item) != int:
            raise ConfigurationError(
                f'all elements in {attribute.name} must be int but item at index {ind} was: {type(item)}'
            )


def is_list_of_str(instance, attribute, value):
    for ind, item in enumerate(value):
        if type(item) != str:
            raise ConfigurationError(
                f'all elements in {attribute.name} must be str but item at index {ind} was: {type(item)}'
            )


def one_of(*choices):
    def check(instance, attribute, value):
        if value not in choices:
            raise ConfigurationError(f'{attribute.name} must be one of {set(choices)}, but was {value!r}.')
    return check
