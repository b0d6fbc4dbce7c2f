"""Exception hierarchy. Every error carries a machine-readable ``code``."""


class GeonumError(Exception):
    code = "error"
    exit_status = 1


class InvalidFieldSpec(GeonumError, ValueError):
    code = "invalid-field-spec"


class DimensionMismatch(GeonumError, ValueError):
    code = "dimension-mismatch"


class InvalidRank(GeonumError, ValueError):
    code = "invalid-rank"


class InvalidScale(GeonumError, ValueError):
    code = "invalid-scale"


class DegenerateBasis(GeonumError, ValueError):
    code = "degenerate-basis"


class NotAModule(GeonumError, ValueError):
    """The realized lattice is not stable under multiplication by the ring of integers."""

    code = "not-an-order-module"


class FieldMismatch(GeonumError, ValueError):
    code = "field-mismatch"


class EmptySublattice(GeonumError, ValueError):
    code = "empty-sublattice"


class ZeroRank(GeonumError, ValueError):
    code = "zero-rank"


class EndpointMismatch(GeonumError, ValueError):
    code = "endpoint-mismatch"


class PoleArgument(GeonumError, ValueError):
    code = "pole-argument"


class HypothesisViolated(GeonumError):
    code = "hypothesis-violated"
    exit_status = 2


class EnumerationTooLarge(GeonumError):
    code = "enumeration-too-large"
    exit_status = 3


class SearchTooLarge(GeonumError):
    code = "search-too-large"
    exit_status = 3


class SamplingStarved(GeonumError):
    code = "sampling-starved"
    exit_status = 3


class ConvergenceError(GeonumError):
    code = "tolerance-not-reached"
    exit_status = 3
