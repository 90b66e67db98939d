"""Exception types shared across the package."""


class BandeauError(Exception):
    """Base class for all package-specific errors."""


class GeometryError(BandeauError, ValueError):
    """Degenerate or invalid geometric input (zero chord, coincident targets, ...)."""


class DomainError(BandeauError, ValueError):
    """Evaluation point outside a curve's x-domain."""


class ContractViolation(BandeauError, ValueError):
    """Caller broke a documented precondition (e.g. endpoint mismatch)."""


class InvalidInstanceError(BandeauError, ValueError):
    """A problem instance violates its structural invariants."""


class InfeasibleParamsError(BandeauError, ValueError):
    """Subproblem parameters leave no feasible solution (too few points for the cut count)."""


class SizeGuardError(BandeauError, RuntimeError):
    """Exhaustive routine refused an instance above its size guard."""


class FormatError(BandeauError, ValueError):
    """Malformed or unrecognized case/plan file content."""
