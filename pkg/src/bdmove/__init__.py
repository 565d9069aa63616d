"""Simulation and validation tools for jump-move and birth-death-move
processes on finite point configurations.
"""

__version__ = "0.1.0"

from .config_space import Configuration, Domain, count, d1, empty, hausdorff, insert, remove

__all__ = [
    "Configuration",
    "Domain",
    "count",
    "d1",
    "empty",
    "hausdorff",
    "insert",
    "remove",
    "__version__",
]
