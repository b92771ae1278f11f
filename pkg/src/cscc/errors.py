"""Exceptions raised by the cscc library.

Argument and precondition problems derive from ValueError; the CLI maps them to
exit code 2. Internal-consistency failures derive from RuntimeError and map to
exit code 1.
"""


class CsccError(Exception):
    """Base class for every error raised by cscc."""


class PreconditionError(CsccError, ValueError):
    """An operation was called outside its documented preconditions."""


class ExtentError(PreconditionError):
    """Lattice extent is malformed or too small for the requested variant."""


class LengthMismatchError(PreconditionError):
    """Two operands act on a different number of qubits."""


class DimensionMismatchError(PreconditionError):
    """Sign vector or logical basis does not match the code length."""


class NotXTypeError(PreconditionError):
    """A Pauli operand was required to be X-type but carries Z bits."""


class OddRotationError(PreconditionError):
    """A diagonal layer has an odd rotation exponent where an S-layer is needed."""


class BoundExceededError(PreconditionError):
    """A brute-force routine was asked to enumerate beyond its bound."""


class UnknownFixtureError(PreconditionError):
    """The requested fixture name is not registered."""


class EmptyResultError(PreconditionError):
    """A projection would remove every qubit of the code."""


class ComplexFormatError(PreconditionError):
    """A serialized complex or code could not be parsed."""


class CodespaceNotPreservedError(CsccError, RuntimeError):
    """The diagonal layer does not map the codespace to itself.

    Attributes:
        witnesses: Offending monomials, or the logical assignment whose image
            is not proportional to its codeword.
    """

    def __init__(self, message: str, witnesses: object = None) -> None:
        super().__init__(message)
        self.witnesses = witnesses


class ConstructionError(CsccError, RuntimeError):
    """The lattice generator produced a complex that fails validation."""


class NotBipartiteError(CsccError, RuntimeError):
    """The qubit adjacency graph admits no even/odd two-coloring."""


class CommutationError(CsccError, RuntimeError):
    """Assembled X and Z checks do not commute."""


class UnclassifiableError(CsccError, RuntimeError):
    """A logical action has a coefficient no T-layer can produce."""


class MembershipError(CsccError, RuntimeError):
    """A commutator-derived Pauli is not in the expected logical coset.

    Attributes:
        residual: Column indices left over after reduction against the coset.
    """

    def __init__(self, message: str, residual: list[int] | None = None) -> None:
        super().__init__(message)
        self.residual = residual or []


class DocumentSchemaError(CsccError, RuntimeError):
    """An output document does not match its shipped JSON schema."""
