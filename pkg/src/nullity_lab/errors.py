"""Exception hierarchy shared by every module."""


class NullityLabError(Exception):
    """Base class for all library errors."""


class ContractError(NullityLabError, ValueError):
    """Invalid ambient space, frame, or mismatched vector dimensions."""


class CatalogError(NullityLabError, ValueError):
    """A model spec or its principal data violates a catalog invariant."""


class NotKappaMemberError(NullityLabError):
    """The structure vector field is not in any kappa-nullity distribution."""


class InconsistentCurvatureError(NullityLabError, ArithmeticError):
    """lambda1 = alpha/2 while lambda1*alpha/2 + c/4 != 0; no Hopf partner exists."""


class StateError(NullityLabError, ValueError):
    """A non-Hopf state violates beta != 0, c != 0 or an operation precondition."""
