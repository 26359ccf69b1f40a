"""Exception hierarchy shared by all discountgap modules."""


class DiscountGapError(Exception):
    """Base class for every error raised by this package."""


class ParamDomainError(DiscountGapError, ValueError):
    """Coupling parameters violate the slope/offset ordering constraints."""


class PreconditionError(DiscountGapError, ValueError):
    """An operation was called outside its stated domain."""


class ScheduleDomainError(DiscountGapError, ValueError):
    """A discount schedule request is infeasible (e.g. denominator <= 0)."""


class ConfigError(DiscountGapError, ValueError):
    """A run configuration file or flag set failed validation."""


class SolverError(DiscountGapError, RuntimeError):
    """Base class for numerical solver failures."""


class BracketError(SolverError):
    """No sign change found while expanding a root bracket."""


class ToleranceError(SolverError):
    """Iteration budget exhausted before reaching the requested tolerance."""


class PartialReportError(SolverError):
    """Some sweep rows failed to solve; carries the failures and the partial rows."""

    def __init__(self, failures, rows):
        self.failures = list(failures)
        self.rows = list(rows)
        detail = "; ".join(f"{tag} j={j} lambda={lam:.3g}: {err}" for tag, j, lam, err in self.failures)
        super().__init__(f"{len(self.failures)} sweep row(s) failed: {detail}")
