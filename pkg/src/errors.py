##################################################################################################
#                                            OVERVIEW                                            #
#                                                                                                #
# Exception hierarchy shared by all modules. Negative mathematical verdicts are reports, not     #
# exceptions; these classes signal malformed input or violated preconditions.                    #
##################################################################################################


class GJError(Exception):
    """Base class for every error raised by this package."""


class FieldMismatchError(GJError):
    """Two irrational elements live in different quadratic fields."""


class ParseError(GJError, ValueError):
    """Element or file text could not be parsed."""


class InputError(GJError, ValueError):
    """A function or perturbation definition is structurally invalid."""


class DomainError(GJError, ValueError):
    """A point lies outside the face it is evaluated on."""


class PreconditionError(GJError):
    """A pipeline step was called on input that violates its precondition."""


class UnresolvedIntervalsError(PreconditionError):
    """The slope structure still has uncovered intervals."""
