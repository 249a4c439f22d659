"""
Errors
======
Failure types shared by every stage, and the exit code each one maps to.
"""

EXIT_OK = 0
EXIT_PROPERTY_VIOLATION = 1
EXIT_RESOURCE_REFUSAL = 2
EXIT_BACKEND_FAILURE = 3


class InvalidPathError(ValueError):
    """A path vector or path pair breaks its invariants."""


class InfeasiblePriceGridError(ValueError):
    """A price grid is not monotone / bounded / on its boundary values."""


class InvalidInstanceError(ValueError):
    """A bipartite instance references missing vertices or breaks its ranges."""


class ModelTooLargeError(ValueError):
    """Projected LP size is over the configured memory cap."""

    def __init__(self, report: dict, cap_gib: float):
        self.report = report
        self.cap_gib = cap_gib
        super().__init__(
            f"model needs ~{report['memory_gib']:.2f} GiB > cap {cap_gib:.2f} GiB "
            f"({report['variables']:,} variables, {report['constraints']:,} constraints, "
            f"<= {report['nonzeros']:,} nonzeros); rerun with --force to build anyway"
        )


class SolverBackendError(RuntimeError):
    """The LP backend crashed or reported numerical trouble."""

    def __init__(self, backend: str, message: str):
        self.backend = backend
        super().__init__(f"[{backend}] {message}")


class CertificationBudgetError(RuntimeError):
    """Enumeration stopped early; partial_min is NOT a certificate."""

    def __init__(self, partial_min: float, checked: int, total: int):
        self.partial_min = partial_min
        self.checked = checked
        self.total = total
        super().__init__(
            f"checked {checked:,} of {total:,} paths (partial min {partial_min:.6f}, not a certificate)"
        )


class SearchError(RuntimeError):
    """Local search could not continue; history holds the iterations done so far."""

    def __init__(self, message: str, history=None):
        self.history = list(history or [])
        super().__init__(message)
