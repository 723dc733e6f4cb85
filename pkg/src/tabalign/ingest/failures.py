from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class IngestFailure:
    """A source record that could not be read; it counts against the readable total."""

    source: str
    reason: str
    detail: str = ""
