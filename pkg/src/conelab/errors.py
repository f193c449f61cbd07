"""Exception types.

Solver breakdowns are deliberately distinct from negative answers: a
membership oracle that cannot decide raises, it never returns False.
"""


class ConelabError(Exception):
    """Base class for all library errors."""


class DimensionMismatchError(ConelabError):
    """Vector or matrix shape incompatible with the ambient space."""


class SolverError(ConelabError):
    """A numerical subroutine failed (infeasible/unbounded/ill-posed), as
    opposed to a well-posed problem with a negative answer."""


class UnderdeterminedError(SolverError):
    """A linear system that should pin down a unique object does not
    (e.g. transposition with respect to a non-faithful state)."""


class NotInvertibleError(ConelabError):
    """A map required to be invertible is singular within tolerance."""


class ResourceLimitError(ConelabError):
    """A combinatorial enumeration exceeded its configured budget."""


class ZeroProbabilityError(ConelabError):
    """Conditioning on an outcome of (numerically) zero probability."""


class NotInformationallyCompleteError(ConelabError):
    """The supplied tests do not span the effect space."""


class DegenerateFormError(ConelabError):
    """The symmetric form of a faithful state has a (near-)zero eigenvalue."""


class AlgebraConstructionError(ConelabError):
    """Effect-algebra assembly violated an algebra identity beyond tolerance."""


class CJNotAssertedError(ConelabError):
    """The theory carries no transformation/positive-form isomorphism."""


class InvariantViolationError(ConelabError):
    """A domain-type invariant failed validation."""

    def __init__(self, invariant: str, detail: str = ""):
        self.invariant = invariant
        self.detail = detail
        super().__init__(f"invariant violated: {invariant}" + (f" ({detail})" if detail else ""))
