"""Dynamics of the spherical Sherrington-Kirkpatrick model.

Random-matrix sampling, semicircle transforms, the limiting
correlation/energy equations, finite-N Langevin simulation and hitting
times of gradient descent and power iteration.
"""

from ._backend import NAME as BACKEND
from .errors import (
    BlowUpError,
    ConfigError,
    DegenerateInputError,
    DomainError,
    HorizonError,
    NotHitError,
    NumericalError,
    SskdynError,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BlowUpError",
    "ConfigError",
    "DegenerateInputError",
    "DomainError",
    "HorizonError",
    "NotHitError",
    "NumericalError",
    "SskdynError",
    "__version__",
]
