"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: usage errors -> 1, data errors -> 2,
solver/infeasibility errors -> 3.
"""


class DrcfError(Exception):
    """Base class for all package errors."""


class InputError(DrcfError):
    """Invalid argument values or dimension mismatches."""


class DataError(DrcfError):
    """Malformed or unusable input data (CSV parsing, degenerate fits)."""


class SolverError(DrcfError):
    """Numerical failure inside an optimization routine."""

    def __init__(self, message, best_x=None):
        super().__init__(message)
        self.best_x = best_x


class InfeasibleError(SolverError):
    """The requested counterfactual target cannot be reached.

    Carries the best iterate found so far in ``best_x``.
    """
