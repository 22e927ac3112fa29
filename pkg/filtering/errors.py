# filtering/errors.py
from core.errors import PolcaError


class DimensionMismatchError(PolcaError):
    pass


class MissingEmbeddingError(PolcaError):
    pass


class FilterConfigError(PolcaError):
    pass
