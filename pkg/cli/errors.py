# cli/errors.py
from core.errors import PolcaError


class ConfigError(PolcaError):
    pass


class TraceFormatError(PolcaError):
    pass


class TraceWriteError(PolcaError):
    pass
