"""Exception hierarchy for cantordyn.

Every error raised by the library derives from CantorDynError so callers
can catch library failures without masking programming errors.
"""

from __future__ import annotations


class CantorDynError(Exception):
    """Base class for all library errors."""


class SpaceMismatchError(CantorDynError):
    """Operands live over different space presentations."""


class InadmissibleWordError(CantorDynError):
    """A word violates the admissibility relation.

    Carries the index of the first failing junction when known.
    """

    def __init__(self, word, junction=None):
        self.word = tuple(word)
        self.junction = junction
        msg = f"inadmissible word {self.word!r}"
        if junction is not None:
            msg += f" (failing junction at index {junction})"
        super().__init__(msg)


class CapExceededError(CantorDynError):
    """An iteration or split cap was exhausted before the computation finished."""


class PiecewiseValidationError(CantorDynError):
    """A piece list fails to define a group element; carries a witness clopen."""

    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)


class UnsupportedSystemError(CantorDynError):
    """Operation defined only for a subclass of systems (e.g. odometers)."""


class StackingMismatchError(CantorDynError):
    """Two partitions are not nested/finer as required by a stacking operation."""


class RefinementDepthError(CantorDynError):
    """A construction needs a deeper level than the one provided."""


class InputFormatError(CantorDynError):
    """Malformed descriptor (JSON or literal); message is location-precise."""
