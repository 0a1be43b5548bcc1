"""Exception hierarchy shared by all qwalk modules."""


class QWalkError(ValueError):
    """Base class for invalid inputs to the walk machinery."""


class NonUnitaryCoinError(QWalkError):
    pass


class NormalizationError(QWalkError):
    pass


class NonMixingCoinError(QWalkError):
    """Raised where an asymptotic formula needs 0 < |a| < 1."""


class DegenerateSurvivalError(QWalkError):
    """The survival probability vanished, so conditioning is undefined."""


class ParityError(QWalkError):
    pass


class EnumerationCapError(QWalkError):
    pass
