# main classes and types
from .pssts import Pssts
from .states import ChannelParams, StateParams
from .model import GridSpec, OutputFormat, QuasiProbKind
from .exception import (
    ExitCode,
    NonRegularPError,
    PsstsError,
    PsstsOracleError,
    PsstsParameterError,
)
from .config import VERSION

__version__ = VERSION

__all__ = [
    'Pssts',
    'StateParams',
    'ChannelParams',
    'GridSpec',
    'OutputFormat',
    'QuasiProbKind',
    'ExitCode',
    'PsstsError',
    'PsstsParameterError',
    'PsstsOracleError',
    'NonRegularPError',
]
