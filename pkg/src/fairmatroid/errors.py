"""Exception hierarchy shared by the library and the CLI."""


class FairDivisionError(Exception):
    """Base class for all errors raised by fairmatroid."""


class InputError(FairDivisionError, ValueError):
    """Malformed input: bad good ids, mismatched dimensions, unparsable JSON."""


class PreconditionError(FairDivisionError):
    """An operation was called on arguments violating its stated precondition."""


class UnsupportedKindError(PreconditionError):
    """The valuation kind cannot be used by this operation (e.g. binary XOS in exchange graphs)."""


class CapabilityError(FairDivisionError):
    """A brute-force computation would exceed its configured budget."""


class InvariantViolation(FairDivisionError, AssertionError):
    """A guarantee that should hold for matroid oracles was found broken."""


class ParetoViolation(PreconditionError):
    """Raised when an allocation assumed Pareto-efficient admits an improvement.

    ``witness`` holds the improving allocation and the good that made it possible.
    """

    def __init__(self, message, good, improved):
        super().__init__(message)
        self.good = good
        self.improved = improved
