"""squarecat: exact cubical and square-structure calculus over F_p."""

from .linalg import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
