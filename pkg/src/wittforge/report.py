"""Structured pass/fail records shared by all verification suites."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

COUNTEREXAMPLE_CAP = 10


@dataclass
class VerificationReport:
    """Outcome of one check suite at one parameter point.

    ``status`` is derived: a report fails exactly when it carries at
    least one counterexample.  ``elapsed_ms`` is informational and is
    excluded from machine-readable output so that reports are
    byte-deterministic.
    """

    suite: str
    params: dict[str, Any]
    checks_run: int = 0
    counterexamples: list[dict[str, str]] = field(default_factory=list)
    elapsed_ms: int = 0

    @property
    def status(self) -> str:
        return "fail" if self.counterexamples else "pass"

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def record(self, condition: bool, input: Any, expected: Any, actual: Any) -> bool:
        """Count one check; on failure store a counterexample."""
        self.checks_run += 1
        if not condition:
            self.counterexamples.append(
                {
                    "input": str(input),
                    "expected": str(expected),
                    "actual": str(actual),
                }
            )
        return condition

    def sort_key(self) -> tuple:
        return (self.suite, sorted_params_string(self.params))

    def to_dict(self, cap: int = COUNTEREXAMPLE_CAP) -> dict[str, Any]:
        shown = self.counterexamples[:cap]
        return {
            "suite": self.suite,
            "params": {k: self.params[k] for k in sorted(self.params)},
            "status": self.status,
            "checks_run": self.checks_run,
            "counterexamples": shown,
            "counterexamples_truncated": len(self.counterexamples) > cap,
        }

    def summary_line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        extra = "" if self.passed else f", {len(self.counterexamples)} counterexample(s)"
        return (
            f"[{mark}] {self.suite} {sorted_params_string(self.params)} "
            f"({self.checks_run} checks, {self.elapsed_ms} ms{extra})"
        )


def sorted_params_string(params: dict[str, Any]) -> str:
    return " ".join(f"{k}={params[k]}" for k in sorted(params))


def emit_report(reports: list[VerificationReport]) -> str:
    """Deterministic JSON array, sorted by (suite, params)."""
    ordered = sorted(reports, key=lambda r: r.sort_key())
    return json.dumps([r.to_dict() for r in ordered], indent=2, sort_keys=False)
