# core/errors.py


class PolcaError(Exception):
    """Base class for every error raised by the search engine and its tooling."""


class DuplicateCandidateError(PolcaError):
    pass


class UnknownCandidateError(PolcaError):
    pass


class EmptyMemoryError(PolcaError):
    pass
