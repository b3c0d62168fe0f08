"""Pass/fail bookkeeping shared by the exact and numeric checks."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Check:
    name: str
    passed: bool
    residual: float | None = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "pass": bool(self.passed), "residual": self.residual}


@dataclass
class Report:
    title: str
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, residual: float | None = None, detail: str = "") -> Check:
        check = Check(name, bool(passed), None if residual is None else float(residual), detail)
        self.checks.append(check)
        return check

    def extend(self, other: "Report", prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.passed, c.residual, c.detail))

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def __bool__(self):
        return self.passed

    def summary(self) -> str:
        lines = [f"{self.title}: {'PASS' if self.passed else 'FAIL'}"]
        for c in self.checks:
            res = "" if c.residual is None else f"  residual={c.residual:.3g}"
            lines.append(f"  [{'pass' if c.passed else 'FAIL'}] {c.name}{res}")
            if c.detail and not c.passed:
                lines.append(f"        {c.detail}")
        return "\n".join(lines)
