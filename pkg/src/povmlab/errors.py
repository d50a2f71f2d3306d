"""Exception hierarchy.

Every domain failure derives from :class:`PovmLabError`, itself a
``ValueError`` so callers that only care about bad input can catch that.
"""


class PovmLabError(ValueError):
    pass


class DimensionMismatch(PovmLabError):
    pass


class NotHermitian(PovmLabError):
    pass


class NotPSD(PovmLabError):
    pass


class NotAnEffect(PovmLabError):
    pass


class NotADensityMatrix(PovmLabError):
    pass


class NotAnIsometry(PovmLabError):
    pass


class CarrierMismatch(PovmLabError):
    pass


class ScalarOutOfRange(PovmLabError):
    pass


class SpaceMismatch(PovmLabError):
    pass


class UnknownAtom(PovmLabError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return str(self.args[0]) if self.args else ""


class NotAMorphism(PovmLabError):
    pass


class NotADistribution(PovmLabError):
    pass


class NotAPOVM(PovmLabError):
    pass


class NotContinuous(PovmLabError):
    """The POVM charges a null atom, so no Radon-Nikodym derivative exists."""


class TooLarge(PovmLabError):
    pass


class RangeError(PovmLabError):
    pass


class Singular(PovmLabError):
    pass


class NotAffine(PovmLabError):
    pass


class NotAState(PovmLabError):
    pass


class NotPositive(PovmLabError):
    pass


class BadParameter(PovmLabError):
    pass


class NotUnit(PovmLabError):
    pass
