# oracles/errors.py
from core.errors import PolcaError


class OracleConfigError(PolcaError):
    pass
