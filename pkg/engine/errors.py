# engine/errors.py
from core.errors import PolcaError


class BudgetError(PolcaError):
    pass


class EvaluationError(PolcaError):
    pass


class ProposalError(PolcaError):
    pass


class DatasetError(PolcaError):
    pass
