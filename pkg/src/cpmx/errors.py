"""Exception hierarchy.

Every error carries a stable ``name`` (the class name) and the offending
element ids so the CLI can emit one machine-readable error object.
"""

from __future__ import annotations

from typing import Iterable


class CpmError(Exception):
    """Base class for all library errors."""

    #: evolution constraint (EC1-EC5) a precondition failure maps to, if any
    constraint: str | None = None

    def __init__(self, message: str = "", ids: Iterable[str] = (), constraint: str | None = None):
        super().__init__(message or self.__class__.__name__)
        self.message = message or self.__class__.__name__
        self.ids = tuple(ids)
        if constraint is not None:
            self.constraint = constraint

    @property
    def name(self) -> str:
        return type(self).__name__

    def to_dict(self) -> dict:
        out = {"error": self.name, "ids": list(self.ids), "message": self.message}
        if self.constraint:
            out["constraint"] = self.constraint
        return out


# -- precondition failures raised by transformations -------------------------


class PreconditionError(CpmError):
    """A pattern or core operation refused to run; the input model is untouched."""


class ElementNotFound(PreconditionError):
    pass


class AlreadyVariable(PreconditionError):
    pass


class DuplicateId(PreconditionError):
    pass


class CapacityExceeded(PreconditionError):
    pass


class PositionNotFound(PreconditionError):
    pass


class MissingVariant(PreconditionError):
    constraint = "EC1"


class NoVariationPoint(PreconditionError):
    constraint = "EC2"


class NotAVariationPoint(PreconditionError):
    pass


class NotAVariant(PreconditionError):
    pass


class UnhandledVariant(PreconditionError):
    constraint = "EC3"


class EmptyResultingVariantSet(PreconditionError):
    constraint = "EC3"


class DependentVariant(PreconditionError):
    constraint = "EC5"


class LastVariant(PreconditionError):
    pass


class InvalidVcc(PreconditionError):
    pass


class MissingResourceCoverage(PreconditionError):
    pass


class CoverageViolation(PreconditionError):
    pass


class TargetActivityNotFound(PreconditionError):
    pass


class ElementInUse(PreconditionError):
    pass


class InvalidParams(PreconditionError):
    pass


class InvalidResult(PreconditionError):
    """The transformation ran but its result failed well-formedness checks."""


class UnknownPattern(CpmError):
    pass


# -- file formats -------------------------------------------------------------


class FormatError(CpmError):
    pass


class ParseError(FormatError):
    def __init__(self, message: str, position: str = ""):
        super().__init__(f"{position}: {message}" if position else message)
        self.position = position


class UnsupportedVersion(FormatError):
    pass


# -- configuration --------------------------------------------------------------


class InvalidSelection(CpmError):
    pass


class SpaceTooLarge(CpmError):
    pass


# -- traces -----------------------------------------------------------------------


class TraceError(CpmError):
    pass


class HashChainBroken(TraceError):
    pass


class EditApplicationFailed(TraceError):
    pass


class EmptyTrace(TraceError):
    pass
