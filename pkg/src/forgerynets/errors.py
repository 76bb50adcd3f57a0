"""exceptions raised by forgerynets

The command-line interface maps these onto exit codes,
see ``forgerynets.__main__.exit_code``.
"""


class ForgeryNetsError(Exception):
    """base class for all errors raised by this package"""


class DimensionError(ForgeryNetsError, ValueError):
    """raised when tensor shapes or extents are incompatible"""


class ConfigurationError(ForgeryNetsError, ValueError):
    """raised for invalid or inconsistent configuration"""


class ContractError(ForgeryNetsError, ValueError):
    """raised when an input violates a stated precondition, e.g. the Bayar constraint"""


class FormatError(ForgeryNetsError):
    """raised when a binary container (dataset or checkpoint) is malformed

    Parameters
    ----------
    message : str
        description of what was wrong
    offset : int
        byte offset in the file where the problem was detected
    path : str, Path
        file being read, if known
    """
    def __init__(self, message, offset, path=None):
        self.offset = offset
        self.path = path
        where = f'{path}: ' if path is not None else ''
        super().__init__(f'{where}{message} (at byte offset {offset})')


class DataError(ForgeryNetsError, ValueError):
    """raised when a dataset is unusable, e.g. empty"""


class NumericalError(ForgeryNetsError, ArithmeticError):
    """raised on non-finite losses or a failed gradient check"""
