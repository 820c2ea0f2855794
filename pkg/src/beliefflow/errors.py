"""Exception hierarchy shared by every module."""


class BeliefFlowError(Exception):
    """Base class for all library errors."""


class ConfigError(BeliefFlowError, ValueError):
    """Invalid configuration or arguments."""


class ParseError(BeliefFlowError, ValueError):
    """Malformed edge-list input."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class EmptyGraphError(ParseError):
    """Edge-list input contained no edges."""


class NonConvergenceError(BeliefFlowError):
    """An iteration or series failed to converge.

    ``residual`` holds the last measured residual for iterative solvers,
    ``beta`` the series ratio for model estimators.
    """

    def __init__(self, message, residual=None, beta=None, steps=None):
        super().__init__(message)
        self.residual = residual
        self.beta = beta
        self.steps = steps


class SolveError(BeliefFlowError):
    """Linear solve failed; carries a condition-number estimate."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class LearningError(BeliefFlowError):
    """Alpha search could not produce a finite error for any candidate."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class CombinatorialGuardError(BeliefFlowError):
    """Brute-force enumeration would exceed the candidate budget."""
