"""Exception types raised across the package."""


class MPFError(Exception):
    """Base class for all errors raised by mpf."""


class NonFiniteCoordinate(MPFError, ValueError):
    def __init__(self, index):
        self.index = int(index)
        super().__init__(f"point {self.index} has a non-finite coordinate")


class DegeneratePoint(MPFError, ValueError):
    """Point at the sensor origin; it has no direction."""


class LengthMismatch(MPFError, ValueError):
    pass


class ShapeMismatch(MPFError, ValueError):
    pass


class MaskMismatch(MPFError, ValueError):
    pass


class InvalidScores(MPFError, ValueError):
    pass


class TruncatedFile(MPFError, ValueError):
    pass


class BadMagic(MPFError, ValueError):
    pass


class UnsupportedVersion(MPFError, ValueError):
    pass


class DuplicateRawId(MPFError, ValueError):
    pass


class TrainIdOutOfRange(MPFError, ValueError):
    pass


class ParseError(MPFError, ValueError):
    def __init__(self, line, message="malformed line"):
        self.line = int(line)
        super().__init__(f"line {self.line}: {message}")


class DomainError(MPFError, ValueError):
    pass


class AllUndefined(MPFError, ValueError):
    """Every evaluated class is absent from both prediction and ground truth."""


class MalformedFile(MPFError, ValueError):
    pass
