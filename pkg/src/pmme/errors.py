"""Exception and warning types used across the package."""


class PMMEError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatchError(PMMEError):
    """Operands live on Hilbert spaces of different dimension."""


class NonHermitianError(PMMEError):
    """A matrix required to be Hermitian is not, beyond tolerance."""


class DefectiveGeneratorError(PMMEError):
    """The generator is not diagonalizable to working precision."""


class DistributionalKernelError(PMMEError):
    """Pointwise time-domain evaluation requested for a distributional kernel."""


class KernelPoleError(PMMEError):
    """The kernel transform was evaluated at (or too close to) a pole."""


class KernelParameterError(PMMEError):
    """A kernel constructor received parameters outside its domain."""


class LaplaceDomainError(PMMEError):
    """A quadrature-backed transform was evaluated left of its abscissa."""


class MapSingularityError(PMMEError):
    """An intermediate map does not exist because some xi_i(t1) is zero."""


class MultiplicityError(PMMEError):
    """A transform denominator has a repeated root beyond the handled order."""


class TalbotConvergenceError(PMMEError):
    """Successive Talbot node counts disagree beyond tolerance."""


class RefinementError(PMMEError):
    """The step-halving error estimate of the Volterra solver exceeds tolerance."""


class ConfigError(PMMEError):
    """A scenario configuration failed to parse or validate.

    ``path`` names the offending key, e.g. ``"kernel.params.A"``.
    """

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class InternalInvariantError(PMMEError):
    """An internal consistency check failed; indicates a bug, not bad input."""


class CPViolationWarning(UserWarning):
    """An evolved state failed positivity beyond tolerance (map not CP there)."""


class PoleLocationWarning(UserWarning):
    """A transform pole with positive real part was found; dynamics grow."""


class GeneratorSpectrumWarning(UserWarning):
    """A generator eigenvalue has positive real part; not a valid GKSL generator."""
