"""Exception hierarchy shared by all torifol modules."""


class TorifolError(Exception):
    """Base class for every error raised by this package."""


class NotStronglyConvex(TorifolError):
    """A cone contains a line."""


class RedundantGenerator(TorifolError):
    """A cone generator lies in the cone spanned by the others."""


class OverlapError(TorifolError):
    """Two fan cones meet outside a common face."""


class DanglingWall(TorifolError):
    """A codimension-one cone is not shared by exactly two maximal cones."""


class UnboundedError(TorifolError):
    """Lattice-point enumeration was asked for an unbounded polyhedron."""


class NotQCartier(TorifolError):
    """A divisor admits no support function; carries the obstructing cone."""

    def __init__(self, cone, message=None):
        self.cone = tuple(cone)
        super().__init__(message or f"no consistent linear functional on cone {self.cone}")


class NonSimplicialFan(TorifolError):
    """An operation requiring a simplicial fan received a non-simplicial one."""


class NonSmoothFan(TorifolError):
    """An operation requiring a smooth fan received a non-smooth one."""


class NonZeroDelta(TorifolError):
    """Canonicity/terminality tests are only defined for an empty boundary."""


class NegativeDelta(TorifolError):
    """The boundary divisor must be effective here."""


class IterationCapExceeded(TorifolError):
    """A surgery loop hit its iteration cap instead of terminating."""


class PreservationError(TorifolError):
    """A singularity class that should be preserved by a step was lost."""


class TheoremViolation(TorifolError):
    """An exact check contradicted a proved statement; indicates a bug."""


class ParseError(TorifolError):
    """Problem file is not syntactically valid; carries a location."""

    def __init__(self, location, message):
        self.location = location
        super().__init__(f"{location}: {message}")


class ValidationError(TorifolError):
    """Problem file parsed but violates a semantic constraint."""

    def __init__(self, location, message, witness=None):
        self.location = location
        self.witness = witness
        super().__init__(f"{location}: {message}")
