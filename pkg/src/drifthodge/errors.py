"""Exception hierarchy shared by all modules.

Two families matter for the CLI exit-code contract: ``PreconditionError``
(bad input, exit 2) and ``NumericalError`` (a method failed on valid
input, exit 3).
"""


class PreconditionError(ValueError):
    """An operation was called with inputs violating its preconditions."""


class MeasureNotFinite(PreconditionError):
    """The Gaussian candidate measure is not finite (S not negative definite)."""


class NumericalError(RuntimeError):
    """A numerical method failed despite valid inputs."""


class ConvergenceFailure(NumericalError):
    """An iterative kernel (eigenvalues, Schur, block swap, ...) did not converge."""


class NoUniqueLyapunovSolution(NumericalError):
    """The Lyapunov operator is singular: two eigenvalues of G sum to zero.

    ``pair`` carries an offending eigenvalue pair.
    """

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class DivergentIntegral(NumericalError):
    """The integral representation does not converge (G not Hurwitz)."""


class SingularBlock(NumericalError):
    """The Lyapunov solution of the reduced Schur block is numerically singular."""


class DivergedTrajectory(NumericalError):
    """An Euler-Maruyama trajectory left the admissible region.

    ``step`` names the time step at which divergence was detected.
    """

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class NumericsWarning(UserWarning):
    """Non-fatal numerical diagnostics (conditioning, stability hints)."""
