"""Typed error hierarchy shared across the package.

Every error carries a stable machine-readable ``code`` so pipeline stage
states and CLI output can report failures without string matching.
"""

from __future__ import annotations


class LlmGeoError(Exception):
    """Base class for all typed errors raised by this package."""

    code: str = "ERROR"

    def __str__(self) -> str:
        base = super().__str__()
        return f"{self.code}: {base}" if base else self.code
