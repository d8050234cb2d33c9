"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: configuration and input problems exit
with 1, file-format and I/O problems with 2, numerical failures with 3.
"""


class ParameterError(ValueError):
    """An argument is out of its documented range (bad epsilon, m > n, ...)."""


class InputError(ValueError):
    """Input data violates a precondition (non-finite, asymmetric, mismatched)."""


class DegenerateGraphError(InputError):
    """A graph row has zero total affinity, so normalization is undefined."""


class NumericalError(RuntimeError):
    """A numerical procedure failed (no convergence, ill-conditioned sketch)."""


class DegenerateSubmatrixError(NumericalError):
    """Every eigenvalue of the sampled submatrix fell below the rank tolerance."""


class FormatError(ValueError):
    """A binary or text file does not match its declared format."""


class ConsistencyError(FormatError):
    """Two related files disagree (e.g. image vs. label record counts)."""


class FoldError(InputError):
    """Cross-validation folds cannot be stratified over the given labels."""


class GridSearchError(NumericalError):
    """Every point of a parameter grid failed to produce a result."""
