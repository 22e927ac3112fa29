# theory/errors.py
from core.errors import PolcaError


class NonConvergenceError(PolcaError):
    pass


class TraceAnnotationError(PolcaError):
    pass


class PartitionError(PolcaError):
    pass
