"""Exception types raised across the package."""


class TNIneqError(ValueError):
    """Base class for all package errors."""


class InvalidIndexSet(TNIneqError):
    pass


class InvalidOperation(TNIneqError):
    pass


class DimensionError(TNIneqError):
    pass


class InvariantError(TNIneqError):
    """A factorization or network violates its structural invariants."""


class HypothesisError(TNIneqError):
    """Family parameters do not satisfy the generator's hypotheses."""


class QueryError(TNIneqError):
    """A multiplicative query has mismatched set sizes."""


class BudgetExceeded(TNIneqError):
    pass


class UnassertedRelation(TNIneqError):
    pass
