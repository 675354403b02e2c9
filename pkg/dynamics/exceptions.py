"""Exceptions raised by the dynamics package."""


class MapSpecError(ValueError):
    """Invalid map specification or number literal.

    ``field`` points at the offending entry of the input document, e.g.
    ``"branches[1].slope"``.
    """

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field

    def __str__(self) -> str:
        message = super().__str__()
        if self.field:
            return f"{self.field}: {message}"
        return message


class ContextMismatchError(ValueError):
    """Two algebraic scalars live in different number fields."""


class AmbiguousPointError(ValueError):
    """A point without a side tag sits on a cut that needs one."""


class UnsupportedMapError(RuntimeError):
    """The requested analysis does not apply to this class of map."""


class NotTransitiveError(UnsupportedMapError):
    """The map is certified (or assumed) not transitive."""


class CertificateError(UnsupportedMapError):
    """An exact self-check of a construction failed, so its result is withheld."""


class PrecisionLimitError(UnsupportedMapError):
    """Root refinement reached ``SIGN_MAX_BITS`` without separating a value from zero."""
