"""Exception hierarchy shared by every module."""


class MetabelError(Exception):
    """Base class for all errors raised by metabel."""


class DimensionMismatch(MetabelError, ValueError):
    pass


class NotASubspace(MetabelError, ValueError):
    pass


class BudgetExceeded(MetabelError):
    """An enumeration would visit more candidates than the configured budget."""

    def __init__(self, count, budget, what="candidates"):
        self.count = count
        self.budget = budget
        super().__init__(f"{count} {what} exceed budget {budget}")


class NotAssociative(MetabelError, ValueError):
    pass


class NotMetabelian(MetabelError, ValueError):
    pass


class InvalidBimodule(MetabelError, ValueError):
    pass


class InvalidDatum(MetabelError, ValueError):
    pass


class BimoduleMismatch(MetabelError, ValueError):
    pass


class HypothesisFailed(MetabelError):
    """A hypothesis of the Ito check does not hold for the given spans."""

    def __init__(self, hypothesis, detail=""):
        self.hypothesis = hypothesis
        super().__init__(f"{hypothesis}: {detail}" if detail else hypothesis)


class UnknownFamily(MetabelError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown family"


class InvalidParams(MetabelError, ValueError):
    pass


class ParseError(MetabelError, ValueError):
    pass


class InvariantViolation(MetabelError, ValueError):
    pass


class InternalError(MetabelError, AssertionError):
    """A property guaranteed by the theory failed to hold; indicates a bug."""
