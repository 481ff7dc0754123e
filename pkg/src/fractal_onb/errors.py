"""Exception types shared across the package."""


class FractalONBError(Exception):
    """Base class for all package-specific errors."""


class OutsideAttractor(FractalONBError):
    """A point does not belong to the attractor (within tolerance)."""


class WrongArity(FractalONBError, ValueError):
    """A collection has the wrong number of entries for the system."""


class NonIntegerInput(FractalONBError, ValueError):
    """An operation restricted to integer data received non-integers."""


class NotUnitary(FractalONBError, ValueError):
    """A matrix fails the unitarity check at the requested tolerance."""


class NotASpectrum(FractalONBError, ValueError):
    """The candidate frequency set is not a spectrum for the scaled digits."""


class MixedSystems(FractalONBError, ValueError):
    """Two objects built over different iterated function systems were mixed."""


class FirstRowNotConstant(FractalONBError, ValueError):
    """The matrix first row is not the constant 1/sqrt(N)."""


class IndexOutOfRange(FractalONBError, IndexError):
    """A grid or word index is outside the valid range."""


class GridTooCoarse(FractalONBError, ValueError):
    """A transfer grid does not cover the images of its own points."""


class LengthMismatch(FractalONBError, ValueError):
    """An input signal length does not match the expected N**n."""
