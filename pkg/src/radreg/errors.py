"""Exception types raised across the package."""


class RadregError(Exception):
    """Base class for all radreg-specific errors."""


class ContractViolation(RadregError, ValueError):
    """An input violates a documented precondition (e.g. non-symmetric matrix)."""


class SingularMatrix(RadregError):
    """Matrix is singular or indefinite where positive definiteness is required."""


class EmptyComplement(RadregError):
    """Orthonormal complement requested for a basis that already spans the space."""


class InvalidNoiseRate(RadregError, ValueError):
    """Massart noise rate outside [0, 1/2)."""


class SimulationInfeasible(RadregError):
    """The inflated Massart rate needed to simulate oblivious noise reaches 1/2."""

    def __init__(self, rate):
        self.rate = rate
        super().__init__(f"inflated rate {rate:.6f} >= 1/2; simulation infeasible")


class InsufficientPoints(RadregError):
    """Fewer points than the ambient dimension requires.

    ``level`` records the recursion depth at which the shortage occurred
    (0 = top-level call).
    """

    def __init__(self, msg, level=0):
        self.level = level
        super().__init__(msg)


class SolverStalled(RadregError):
    """The LP backend failed to report an optimal solution."""


class Degenerate(RadregError):
    """Brute-force enumeration found no invertible interpolation subset."""


class NonIdentifiable(RadregError):
    """Covariates do not span the ambient space; the target is not identifiable."""

    def __init__(self, msg, level=0):
        self.level = level
        super().__init__(msg)


class HeavySubspaceEncountered(RadregError):
    """Single-shot recovery hit a heavy subspace; the recursive variant is needed.

    Carries the detected subspace in ``heavy``.
    """

    def __init__(self, heavy):
        self.heavy = heavy
        super().__init__(
            f"heavy subspace of dim {heavy.dim} holds fraction "
            f"{heavy.fraction:.3f} > {heavy.dim}/{heavy.ambient_dim}"
        )


class HalfspaceEmpty(RadregError):
    """No sample lies in the closed positive halfspace of the query."""


class NoRecovery(RadregError):
    """Ellipsoid search terminated without a certified parameter.

    ``diagnostics`` holds the final ellipsoid state and step counters.
    """

    def __init__(self, msg, diagnostics=None):
        self.diagnostics = diagnostics or {}
        super().__init__(msg)


class MalformedCsv(RadregError):
    """Non-numeric or ragged cell in a dataset file (1-based row/col)."""

    def __init__(self, row, col, detail=""):
        self.row = row
        self.col = col
        super().__init__(f"malformed CSV cell at row {row}, column {col}: {detail}")


class DimensionMismatch(RadregError):
    """Dataset rows disagree about the number of columns."""
