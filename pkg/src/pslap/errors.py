"""Exception taxonomy shared by the library and the CLI.

The CLI maps these onto its exit codes: input/parse problems -> 2,
numerical failures -> 3, semantic mismatches -> 4.
"""


class PslapError(Exception):
    """Base class for all package errors."""


class InputError(PslapError):
    """Bad input data or configuration (CLI exit code 2)."""


class NumericalError(PslapError):
    """Numerical failure inside a computation (CLI exit code 3)."""


class SemanticError(PslapError):
    """Input parsed fine but contradicts the request (CLI exit code 4)."""


class OverlappingPoints(InputError):
    """Two points closer than the minimum separation."""


class InvalidPartition(InputError):
    """Bipartite distance spec whose sets are not disjoint-covering."""


class DegenerateInput(InputError):
    """Too few points (or otherwise unusable geometry) for the operation."""


class NotAFace(InputError):
    """A claimed face relation does not hold."""


class ZeroF(NumericalError):
    """Simplex weight underflowed to zero; restriction scalars undefined."""


class DimensionMismatch(InputError):
    """Inconsistent snapshot/complex/array dimensions."""


class NonSymmetric(NumericalError):
    """Matrix asymmetry exceeds the symmetric-eigensolver tolerance."""


class MalformedRecord(InputError):
    """A structure-file record could not be parsed."""

    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class ResidueNotFound(SemanticError):
    """Mutation site (chain, residue number) absent from the structure."""


class ResidueIdentityMismatch(SemanticError):
    """Residue at the mutation site does not match the declared amino acid."""


class GridMismatch(InputError):
    """Number of spectrum summaries disagrees with the filtration grid."""


class InstanceTooLarge(InputError):
    """Instance exceeds the brute-force oracle's size limit."""
