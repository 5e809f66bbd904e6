"""Photon Green's functions of molecular polaritons from the
block-tridiagonal continued fraction and its 1/N expansion.
"""

__version__ = '0.1.0'

from .exceptions import * # NOQA
from .model import * # NOQA
from .engines import * # NOQA
from .spectra import * # NOQA
from .chi import * # NOQA
from .diagrams import * # NOQA
from .presets import * # NOQA
from .config import * # NOQA
