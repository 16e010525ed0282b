"""Exception hierarchy.

Every error raised deliberately by the package derives from
:class:`DisclosureControlError`, which is itself a ``ValueError`` so that
callers using plain ``except ValueError`` keep working.
"""


class DisclosureControlError(ValueError):
    """Base class for all package errors."""


class NegativeEntry(DisclosureControlError):
    def __init__(self, u, v, value=None):
        self.u, self.v, self.value = u, v, value
        super().__init__(f"negative (or invalid) entry {value!r} at ({u}, {v})")


class RowSumViolation(DisclosureControlError):
    def __init__(self, u, actual_sum):
        self.u, self.actual_sum = u, actual_sum
        super().__init__(f"row {u} sums to {actual_sum!r}, expected 1")


class ShapeMismatch(DisclosureControlError):
    pass


class UnknownCategory(DisclosureControlError):
    def __init__(self, value):
        self.value = value
        super().__init__(f"unknown category {value!r}")


class EmptyInput(DisclosureControlError):
    pass


class DomainTooSmall(DisclosureControlError):
    pass


class DomainMismatch(DisclosureControlError):
    pass


class InvalidDistribution(DisclosureControlError):
    pass


class SingularMatrix(DisclosureControlError):
    def __init__(self, det):
        self.det = det
        super().__init__(f"transition matrix is singular (|det| = {abs(det):.3g})")


class UnreachableReportedValue(DisclosureControlError):
    def __init__(self, v):
        self.v = v
        super().__init__(f"reported value {v!r} has probability 0 under the prior")


class NegativeEpsilon(DisclosureControlError):
    pass


class NoClusterLabels(DisclosureControlError):
    pass


class NonCategoricalSensitive(DisclosureControlError):
    pass


class TBelowOne(DisclosureControlError):
    pass


class LengthMismatch(DisclosureControlError):
    pass


class UnorderedCategorical(DisclosureControlError):
    pass


class UnknownCriterion(DisclosureControlError):
    pass


class AlphaRangeViolation(DisclosureControlError):
    pass


class ParseError(DisclosureControlError):
    def __init__(self, message, line=None, column=None):
        self.line, self.column = line, column
        loc = []
        if line is not None:
            loc.append(f"line {line}")
        if column is not None:
            loc.append(f"column {column!r}")
        prefix = f"{', '.join(loc)}: " if loc else ""
        super().__init__(prefix + message)


class SchemaMismatch(DisclosureControlError):
    pass


class DuplicateHeader(DisclosureControlError):
    pass
