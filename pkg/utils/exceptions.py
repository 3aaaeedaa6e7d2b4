"""
Error taxonomy for resochi

Theorem verdicts are never raised; everything here signals either bad input
or a computation the library refuses to perform.
"""


class ResochiError(Exception):
    """Base class for every error raised by the toolkit"""


class DomainError(ResochiError, ValueError):
    """An argument lies outside the domain of the operation"""


class InputFormatError(ResochiError, ValueError):
    """A problem or orbit-system document is malformed"""


class UnsupportedOperationError(ResochiError):
    """The number system does not provide this operation"""


class UnresolvedSymbolError(ResochiError):
    """An irrational symbol has no float witness"""


class ContainmentError(ResochiError):
    """A lattice is not contained in the lattice it is compared to"""


class InternalConsistencyError(ResochiError):
    """Two independent computations of the same invariant disagree"""


class InfiniteChernError(ResochiError):
    """Resonances are undefined when the minimal Chern number is infinite"""


class MeanIndexZeroError(ResochiError):
    """An orbit with vanishing mean index enters a reciprocal sum"""


class EnumerationBoundError(ResochiError):
    """Iterates of an orbit cannot be enumerated up to a degree bound"""


class DegenerateIterateError(ResochiError):
    """An iterate of an orbit is degenerate (an elliptic block has k*theta integral)"""


class DegenerateSpectrumError(ResochiError, ValueError):
    """A quadratic Hamiltonian has repeated coefficients"""


class ExtrapolationError(ResochiError):
    """A tabulated index law cannot certify a value beyond its table"""
