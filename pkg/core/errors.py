"""
Error types for flowstruct
"""

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class FlowStructError(Exception):
    """Base class for every error raised on purpose by flowstruct"""
    exit_code = EXIT_DATA


class ConfigError(FlowStructError):
    """Invalid configuration value or flag combination"""
    exit_code = EXIT_USAGE


class SchemaError(FlowStructError):
    """A source file does not have the columns the mapping asks for"""


class DataError(FlowStructError, ValueError):
    """Input data cannot support the requested computation"""


class DimensionMismatchError(DataError):
    """Two distributions over different dimensions were compared"""


class MissingBaseYearError(DataError):
    """The requested drift base year has no records"""


class InfeasibleTargetError(DataError):
    """A synthetic target cannot be realised with the requested record count"""


class OutputError(FlowStructError):
    """A report or plot-data file could not be written"""


class NoRecordsError(DataError):
    """Nothing survived ingestion; the tallies are kept on the exception"""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
