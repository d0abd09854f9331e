# src/models/verdict.py
from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class BoundVerdict:
    """Outcome of evaluating one recovery condition.

    `holds` is only ever true when the derivation's preconditions (`valid`)
    are met; `lhs` is reported either way.
    """

    name: str
    lhs: float
    holds: bool
    valid: bool
    detail: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.holds and not self.valid:
            raise ValueError(f"{self.name}: a verdict cannot hold while invalid")
        if self.lhs < 0:
            raise ValueError(f"{self.name}: lhs must be nonnegative, got {self.lhs}")

    def __repr__(self):
        return (
            f"BoundVerdict({self.name}, lhs={self.lhs:.6g}, "
            f"holds={self.holds}, valid={self.valid})"
        )

    def describe_detail(self) -> str:
        """Detail as 'key=value' pairs joined by ';' for CSV cells."""
        return ";".join(f"{key}={value}" for key, value in self.detail.items())
