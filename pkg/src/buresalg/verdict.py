"""Pass/fail records shared by the checking operations."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Verdict:
    """Outcome of one numerical check.

    ``residual`` is the magnitude that was compared with ``tolerance``;
    ``details`` holds whatever intermediate values help a reader audit it.
    """

    name: str
    passed: bool
    residual: float
    tolerance: float
    details: dict[str, Any] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed


def check(name: str, residual: float, tolerance: float, **details) -> Verdict:
    residual = float(residual)
    return Verdict(name, bool(residual <= tolerance), residual, float(tolerance), details)
