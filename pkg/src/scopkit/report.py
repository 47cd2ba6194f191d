"""Report-style validation results shared by the lattice, SCOP and Hilbert validators."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Violation:
    check: str
    message: str
    witness: tuple[Any, ...] = ()

    def __str__(self):
        return f"[{self.check}] {self.message}"


@dataclass
class ValidationReport:
    """Collected violations; an empty list means the object is valid.

    ``notes`` carries informational findings that are not violations
    (e.g. the optional weak-modularity flag on lattices).
    """

    subject: str
    violations: list[Violation] = field(default_factory=list)
    notes: dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def add(self, check: str, message: str, *witness: Any) -> None:
        self.violations.append(Violation(check, message, tuple(witness)))

    def checks(self) -> set[str]:
        return {v.check for v in self.violations}

    def extend(self, other: "ValidationReport") -> None:
        self.violations.extend(other.violations)

    def summary(self) -> str:
        if self.ok:
            return f"{self.subject}: valid"
        lines = [f"{self.subject}: {len(self.violations)} violation(s)"]
        lines.extend(f"  {v}" for v in self.violations)
        return "\n".join(lines)
