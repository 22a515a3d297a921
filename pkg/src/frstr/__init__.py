"""Numerical toolkit for fractal strings, their zeta functions and spectra."""
__version__ = "0.1.0"

from ._core import BACKEND  # noqa: E402
from .errors import FrstrError  # noqa: E402
from .strings import (  # noqa: E402
    FractalString,
    SelfSimilarSpec,
    a_string,
    cantor_string,
    from_lengths,
    self_similar_string,
)
from .zeta_engine import zeta  # noqa: E402

__all__ = [
    "BACKEND",
    "FractalString",
    "FrstrError",
    "SelfSimilarSpec",
    "a_string",
    "cantor_string",
    "from_lengths",
    "self_similar_string",
    "zeta",
    "__version__",
]
