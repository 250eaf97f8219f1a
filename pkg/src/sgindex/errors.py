"""Exception types shared by every module.

Each error carries a short message naming the offending entity (a vertex
index, face index, bit position...) so that callers can report it directly.
"""


class SgiError(Exception):
    """Base class for all library errors."""


class ValidationError(SgiError):
    """Raised when an input mesh or file fails validation."""


# bitvec
class EmptyBitVector(SgiError):
    pass


class PositionOutOfRange(SgiError, IndexError):
    pass


class RankOutOfRange(SgiError, IndexError):
    pass


# geom
class DegenerateTriangle(SgiError):
    pass


# mesh
class DuplicatePoint(ValidationError):
    pass


class NonTriangleFace(ValidationError):
    pass


class BadOrientation(ValidationError):
    pass


class EulerViolation(ValidationError):
    pass


class CoordinateOverflow(ValidationError):
    pass


class TooSmall(ValidationError):
    pass


class NotSimple(ValidationError):
    pass


class GeometryError(ValidationError):
    pass


class FormatError(ValidationError):
    pass


# separator
class ParamError(SgiError, ValueError):
    pass


# permcode
class CapacityExceeded(SgiError):
    pass


class NotAPermutation(SgiError, ValueError):
    pass


class InternalCapacity(SgiError):
    pass


class CorruptPermutation(SgiError):
    pass


class NonSimpleFace(ValidationError):
    pass


# pointloc / index
class TagArityMismatch(SgiError, ValueError):
    pass


class OutsideHull(SgiError):
    def __init__(self, msg="outside hull"):
        super().__init__(msg)


class IdOutOfRange(SgiError, IndexError):
    pass


class PairLayoutError(SgiError):
    """A build could not keep graph-label pairs in ascending order."""


class ContainerError(SgiError):
    pass
