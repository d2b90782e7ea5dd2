"""Exception hierarchy for liftput."""


class LiftPutError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(LiftPutError, ValueError):
    """Input failed a structural or probabilistic check."""


class NegativeEntry(ValidationError):
    pass


class SumNotOne(ValidationError):
    pass


class ZeroMarginal(ValidationError):
    """A marginal has a zero entry, so lift is undefined."""


class InconsistentMechanism(ValidationError):
    """P_{X|Y} P_Y does not reproduce P_X."""


class InfeasibleEps(ValidationError):
    pass


class SchemaMismatch(ValidationError):
    pass


class NumericalFailure(LiftPutError, ArithmeticError):
    """A numerical routine could not produce a trustworthy answer."""


class CapExceeded(NumericalFailure):
    pass


class LPInfeasible(NumericalFailure):
    """The mixture LP has no feasible point (P_X outside the candidate hull)."""


class ResampleLimit(NumericalFailure):
    pass
