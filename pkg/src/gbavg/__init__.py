"""Average Goldbach representation sums and explicit-formula verification."""

from .mangoldt import MangoldtTable, build_mangoldt, lambda0, psi, psi1

__version__ = "0.1.0"

__all__ = [
    "MangoldtTable",
    "build_mangoldt",
    "psi",
    "psi1",
    "lambda0",
    "__version__",
]
