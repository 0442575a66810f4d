"""Exception hierarchy.

Each class carries the CLI exit code it maps to, so the command layer
does not need a lookup table.
"""


class FPMCError(Exception):
    exit_code = 1


class InputInvalid(FPMCError, ValueError):
    """Malformed or structurally inconsistent input."""

    exit_code = 2


class UnsupportedPrecondition(FPMCError):
    """Input is well formed but outside the domain an operation supports."""

    exit_code = 3


class AdjunctionInconsistent(FPMCError):
    """Declared genera admit no canonical class."""

    exit_code = 1


class GeometricInconsistency(FPMCError):
    """A blow-up step violates intersection budgets or genus bounds."""

    exit_code = 1


class NotAntimultiple(FPMCError):
    """A fiber divisor is not a rational multiple of -K."""

    exit_code = 1


class Infeasible(FPMCError):
    """No totally isotropic subgroup of the required order exists."""

    exit_code = 1


class AmbiguousStructure(FPMCError):
    """Isotropic subgroups of the required order are not all isomorphic."""

    exit_code = 1

    def __init__(self, message: str, types=()):
        super().__init__(message)
        self.types = list(types)
