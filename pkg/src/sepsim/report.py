"""Verification report model shared by all construction verifiers."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CheckResult:
    """Outcome of one named invariant check.

    name identifies the invariant; detail carries the counterexample
    (stage, actor, element) when the check failed.
    """

    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        if self.passed:
            return f"check {self.name} pass"
        return f"check {self.name} fail {self.detail}".rstrip()


@dataclass
class VerificationReport:
    construction: str
    scenario_hash: str
    checks: list[CheckResult] = field(default_factory=list)
    caveats: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def render(self) -> str:
        lines = ["sepsim-report 1"]
        lines.append(f"construction {self.construction}")
        lines.append(f"scenariohash {self.scenario_hash}")
        for c in self.checks:
            lines.append(c.line())
        for cv in self.caveats:
            lines.append(f"caveat {cv}")
        lines.append(f"result {'pass' if self.passed else 'fail'}")
        return "\n".join(lines) + "\n"
