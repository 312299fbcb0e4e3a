"""Exception hierarchy shared by all modules."""


class AnonylatError(Exception):
    """Base class for every error raised by this package."""


class SchemaError(AnonylatError):
    """Dataset schema is inconsistent with the data or the request."""


class ParseError(AnonylatError):
    """A cell value could not be parsed under its declared kind."""


class FormatError(AnonylatError):
    """A hierarchy file violates the on-disk format contract."""


class CoverageError(AnonylatError):
    """A value observed in the data is not covered by its hierarchy."""


class NestingError(AnonylatError):
    """Interval level widths do not nest."""


class BoundsError(AnonylatError):
    """A generalisation level is outside [0, height]."""


class SizeError(AnonylatError):
    """The dataset is too small for the requested operation."""


class InfeasibilityError(AnonylatError):
    """No k-anonymous solution exists (k exceeds the row count)."""


class DegeneratePartitionError(AnonylatError):
    """A partition has no equivalence classes where one is required."""


class TaggingError(AnonylatError):
    """Conflicting or incomplete lattice tagging (algorithm bug)."""


class ContractError(AnonylatError):
    """A postcondition another component relies on does not hold."""


class GuardError(AnonylatError):
    """A test-scale guard was exceeded (oracle input too large)."""
