"""Exception hierarchy shared by all modules.

DomainError: a caller violated a documented precondition (bad parameter,
out-of-region request, lattice mismatch).  The CLI maps it to exit code 1.

ConsistencyError: an internal cross-check failed (two construction routes
disagree, a ledger identity broke after surgery).  The CLI maps it to exit
code 2.  Seeing one of these means a bug, not bad input.
"""


class DomainError(ValueError):
    """A documented precondition was violated by the caller."""


class ConsistencyError(RuntimeError):
    """An internal invariant or dual-route agreement check failed."""
