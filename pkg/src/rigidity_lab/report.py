"""Uniform pass/fail reports for the exact and numeric identity checks."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CheckReport:
    name: str
    passed: bool
    details: list[str] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        head = f"[{status}] {self.name}"
        if not self.details:
            return head
        return head + "\n" + "\n".join(f"    {line}" for line in self.details)


def combine(name: str, reports: list[CheckReport]) -> CheckReport:
    passed = all(r.passed for r in reports)
    details = []
    for r in reports:
        details.append(("PASS " if r.passed else "FAIL ") + r.name)
        details.extend("  " + d for d in r.details if not r.passed)
    return CheckReport(name, passed, details)
