"""Complete and non-blocking point sets in F2^r: constructions, oracles, exact values, bounds."""

from __future__ import annotations

__version__ = "0.1.0"
