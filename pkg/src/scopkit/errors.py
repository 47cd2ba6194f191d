"""Exception types raised across scopkit."""


class ScopError(Exception):
    """Base class for all scopkit errors."""


class UnknownElementError(ScopError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class UnknownCoupleError(ScopError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class UnknownEntryError(ScopError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class LatticeError(ScopError, ValueError):
    """Raised for structurally invalid lattices (missing infimum, too large, ...)."""


class TooManyAtomsError(LatticeError):
    pass


class InvalidLatticeError(LatticeError):
    """Eager validation failed; ``report`` holds the violations."""

    def __init__(self, report):
        super().__init__(f"invalid lattice: {report.summary()}")
        self.report = report


class EmptyRestrictionError(ScopError, ValueError):
    pass


class DimensionMismatchError(ScopError, ValueError):
    pass


class NonUnitStateError(ScopError, ValueError):
    pass


class RankDeficientError(ScopError, ValueError):
    pass


class InvalidFamilyError(ScopError, ValueError):
    def __init__(self, report):
        super().__init__(f"invalid spectral family: {report.summary()}")
        self.report = report


class FeatureMismatchError(ScopError, ValueError):
    pass


class EmptyExemplarSetError(ScopError, ValueError):
    pass


class UnnormalizedTableError(ScopError, ValueError):
    pass


class ParseError(ScopError, ValueError):
    """Malformed input document; carries a 1-based line and column."""

    def __init__(self, message, line=None, column=None, source=None):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        where = ""
        if line is not None:
            where = f"{source or '<input>'}:{line}:{column or 1}: "
        super().__init__(f"{where}{message}")
