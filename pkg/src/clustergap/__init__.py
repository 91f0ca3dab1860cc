"""Desk-scale laboratory for clustering hardness in Gaussian mixtures."""
from __future__ import annotations

from .partition import Partition

__version__ = "0.1.0"

__all__ = ["Partition", "__version__"]
