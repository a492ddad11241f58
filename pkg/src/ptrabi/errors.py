"""Exception hierarchy shared by all ptrabi modules."""


class PTRabiError(Exception):
    """Base class for every error raised by ptrabi."""


class ConfigurationError(PTRabiError, ValueError):
    """Invalid user-supplied configuration (cutoff, grid, flags)."""


class UnsupportedParameterError(PTRabiError, ValueError):
    """The requested parameter point is outside what the method handles (e.g. g = 0)."""


class PoleProximityError(PTRabiError):
    """Trial energy lies inside the guard band around a pole line ``n + g**2``."""

    def __init__(self, n, energy, distance):
        self.n = n
        self.energy = energy
        self.distance = distance
        super().__init__(
            f"E={energy!r} is within {distance:.3g} of pole line n={n}"
        )


class SeriesConvergenceError(PTRabiError):
    """The G-function series hit its term cap before converging."""

    def __init__(self, message, gvalue=None):
        self.gvalue = gvalue
        super().__init__(message)


class NoConvergenceError(PTRabiError):
    """An iterative root finder failed; ``trace`` holds the iterates."""

    def __init__(self, message, trace=()):
        self.trace = list(trace)
        super().__init__(message)


class NoExceptionalPointError(PTRabiError):
    """The per-parity zero-pair predicate never flips inside the window."""


class RefinementError(PTRabiError):
    """Newton polishing of an exceptional point stagnated."""

    def __init__(self, message, bracket=None, trace=()):
        self.bracket = bracket
        self.trace = list(trace)
        super().__init__(message)


class NoDegeneracyError(PTRabiError):
    """No sign change of f_n on the pole line inside the search range."""


class SelfOrthogonalityError(PTRabiError):
    """Biorthogonal overlap <L|R> vanished (the state sits at an exceptional point)."""


class MatchingError(PTRabiError):
    """Eigenpairs at two parameter points could not be identified with each other."""


class ReconstructionRangeError(PTRabiError):
    """Weighted expansion coefficients do not decay inside the available cutoff."""


class EigensolverError(PTRabiError):
    """Dense eigensolver failure."""
