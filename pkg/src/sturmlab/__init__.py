"""sturmlab: certified computation with low-complexity codings of rotations,
contracted rotation maps, and algebraic heights."""

__version__ = "0.1.0"

from . import errors, kernel  # noqa: F401

__all__ = ["errors", "kernel", "__version__"]
