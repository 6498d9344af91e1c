import logging

from .__about__ import __current_year__, __version__
from ._app import run
from .errors import BudgetError, InputError, ListDecError, NumericalError

logging.getLogger(__name__).addHandler(logging.NullHandler())

__all__ = [
    "BudgetError",
    "InputError",
    "ListDecError",
    "NumericalError",
    "run",
    "__version__",
    "__current_year__",
]
