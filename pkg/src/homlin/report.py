"""Pass/fail records shared by the theorem checks and the CLI."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CheckRecord:
    name: str
    anchor: str
    residual: float
    tol: float
    passed: bool

    def as_dict(self):
        return {"name": self.name, "anchor": self.anchor, "residual": self.residual,
                "tol": self.tol, "pass": self.passed}


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def below(self, name, anchor, residual, tol):
        """Record a check that passes when ``residual < tol``."""
        r = float(residual)
        self.checks.append(CheckRecord(name, anchor, r, float(tol), bool(r < tol)))
        return r

    def above(self, name, anchor, value, floor):
        """Record a negative control: passes when ``value > floor``."""
        v = float(value)
        self.checks.append(CheckRecord(name, anchor, v, float(floor), bool(v > floor)))
        return v

    def extend(self, other: "VerificationReport", prefix: str = ""):
        for c in other.checks:
            self.checks.append(CheckRecord(prefix + c.name, c.anchor, c.residual, c.tol, c.passed))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failing(self):
        return [c.name for c in self.checks if not c.passed]

    def __getitem__(self, name) -> CheckRecord:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)
