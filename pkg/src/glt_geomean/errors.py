"""
Exception hierarchy for the package.

Every error derives from ``ValueError`` or ``RuntimeError`` so that callers
catching the builtin types keep working. The CLI maps ``ConfigError`` to exit
code 2 and every other error to exit code 1.
"""

from __future__ import annotations


class RejectedInputError(ValueError):
    """Input violates a precondition (non-finite entries, size mismatch, bad parameter)."""


class NotHPDError(ValueError):
    """
    A matrix that must be Hermitian positive definite is not.

    Attributes:
        eigenvalue: The offending eigenvalue, or None when the failure was
            detected by a failed Cholesky factorization.
    """

    def __init__(self, message: str, eigenvalue: float | None = None) -> None:
        super().__init__(message)
        self.eigenvalue = eigenvalue


class CoefficientError(ValueError):
    """Unknown generating function, insufficient quadrature resolution, or level/block mismatch."""


class ConstructionError(ValueError):
    """
    A sequence expression could not be evaluated as declared.

    Attributes:
        node: Human-readable description of the offending expression node.
    """

    def __init__(self, message: str, node: str) -> None:
        super().__init__(f"{message} (node: {node})")
        self.node = node


class ConvergenceError(RuntimeError):
    """
    The epsilon schedule of the candidate symbol was exhausted.

    Attributes:
        gap: Frobenius distance between the last two accelerated iterates.
    """

    def __init__(self, message: str, gap: float) -> None:
        super().__init__(message)
        self.gap = gap


class SymbolEvaluationError(RuntimeError):
    """
    A symbol failed to evaluate at a grid node.

    Attributes:
        x: Space coordinates of the node.
        theta: Frequency coordinates of the node.
    """

    def __init__(self, message: str, x: tuple[float, ...], theta: tuple[float, ...]) -> None:
        super().__init__(f"{message} at x={x}, theta={theta}")
        self.x = x
        self.theta = theta


class ExperimentError(RuntimeError):
    """
    A stage of an experiment run failed.

    Attributes:
        experiment_id: Identifier of the failing experiment.
        n: Sequence parameter being processed, or None for n-independent stages.
        stage: Name of the failing stage ("build", "mean", "spectrum", "symbol", "emit").
    """

    def __init__(self, experiment_id: str, n: int | None, stage: str, cause: str) -> None:
        where = f"n={n}, " if n is not None else ""
        super().__init__(f"experiment {experiment_id} failed ({where}stage={stage}): {cause}")
        self.experiment_id = experiment_id
        self.n = n
        self.stage = stage


class ConfigError(ValueError):
    """
    Experiment configuration or run defaults are malformed.

    Attributes:
        path: JSON path (or pyproject key) of the offending entry.
    """

    def __init__(self, path: str, message: str) -> None:
        super().__init__(f"{path}: {message}")
        self.path = path
