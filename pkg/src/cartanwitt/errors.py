"""Exception types shared across the package."""


class CartanWittError(Exception):
    """Base class for all package-specific errors."""


class UnsupportedPrime(CartanWittError, ValueError):
    """Raised when the base prime is not an odd prime in the supported range."""


class ModulusMismatch(CartanWittError, ValueError):
    """Raised when values over different prime fields are combined."""


class ShapeError(CartanWittError, ValueError):
    """Raised on dimension or variable-count mismatches."""


class ArgumentError(CartanWittError, ValueError):
    """Raised on invalid argument values (indices out of range, bad parity, ...)."""


class ConstructionMismatch(CartanWittError):
    """Raised when two independent constructions of the same algebra disagree."""


class NotInContactImage(CartanWittError):
    """Raised when a derivation does not come from the contact (or Hamiltonian) operator."""


class EmbeddingError(CartanWittError):
    """Raised when an embedding image falls outside the target algebra."""


class NotInvariant(CartanWittError):
    """Raised when a subspace is not stable under the embedded Witt-algebra action.

    Carries the offending generator index and row so the caller can see
    which block specification was wrong.
    """

    def __init__(self, generator: int, row: int, message: str = ""):
        self.generator = generator
        self.row = row
        super().__init__(
            message or f"subspace not invariant: generator {generator}, basis row {row}"
        )


class Unclassifiable(CartanWittError):
    """Raised when a module does not match any block shape from the catalogue."""


class OracleMismatch(CartanWittError):
    """Raised when the brute-force composition series disagrees with the fast path."""


class DecompositionStuck(CartanWittError):
    """Raised when the greedy block peel cannot make progress."""
