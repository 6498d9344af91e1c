"""Exception hierarchy shared by the library and the CLI."""


class ListDecError(Exception):
    """Base class for every error raised by listdec."""


class InputError(ListDecError, ValueError):
    """A precondition or domain restriction was violated (CLI exit code 1)."""


class BudgetError(ListDecError):
    """An enumeration or size budget would be exceeded (CLI exit code 2)."""


class NumericalError(ListDecError, ArithmeticError):
    """A numerical post-condition failed, e.g. an inner product that does not snap."""
