"""Structured run reports: exact values only, stable text rendering.

Every numeric field is rendered as a decimal integer or an exact fraction
string; a "conditional" status names the unmet hypothesis.  The text form
is deterministic so reports can be golden-file tested; wall time goes to
stderr, never into the report body.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

PASS = "pass"
FAIL = "fail"
CONDITIONAL = "conditional"
SKIPPED = "skipped"


def fmt(value) -> str:
    """Render ints, Fractions, bools, masks and short lists exactly."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(fmt(v) for v in value) + "]"
    return str(value)


def mask_str(mask: int) -> str:
    """Subset-of-indices rendering of a bitmask, e.g. {0,2}."""
    return "{" + ",".join(str(i) for i in range(mask.bit_length()) if (mask >> i) & 1) + "}"


@dataclass
class CheckRecord:
    name: str
    status: str
    details: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)
    hypothesis: Optional[str] = None  # set when status == conditional

    def line(self) -> str:
        parts = [f"check: {self.name}", f"status={self.status}"]
        if self.hypothesis:
            parts.append(f"unmet={self.hypothesis}")
        for k, v in self.details.items():
            parts.append(f"{k}={fmt(v)}")
        out = " ".join(parts)
        for w in self.witnesses[:8]:
            out += f"\n  witness: {w}"
        return out


@dataclass
class RunReport:
    command: str
    inputs: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    values: dict = field(default_factory=dict)
    seed: Optional[int] = None

    def add(self, record: CheckRecord) -> CheckRecord:
        self.checks.append(record)
        return record

    def check(self, name: str, ok: bool, details: Optional[dict] = None, **kw) -> CheckRecord:
        return self.add(CheckRecord(name, PASS if ok else FAIL, details or {}, **kw))

    def value(self, name: str, value) -> None:
        self.values[name] = value

    @property
    def failed(self) -> bool:
        return any(c.status == FAIL for c in self.checks)

    @property
    def status(self) -> str:
        if self.failed:
            return FAIL
        if any(c.status == CONDITIONAL for c in self.checks):
            return CONDITIONAL
        return PASS

    def exit_code(self) -> int:
        return 1 if self.failed else 0

    def render_text(self) -> str:
        lines = [f"report: {self.command}"]
        if self.inputs:
            lines.append(
                "input: " + " ".join(f"{k}={fmt(v)}" for k, v in self.inputs.items())
            )
        for c in self.checks:
            lines.append(c.line())
        for k, v in self.values.items():
            lines.append(f"value: {k} {fmt(v)}")
        if self.seed is not None:
            lines.append(f"seed: {self.seed}")
        lines.append(f"overall: {self.status}")
        return "\n".join(lines) + "\n"

    def render_json(self) -> str:
        def enc(v):
            if isinstance(v, Fraction):
                return str(v)
            if isinstance(v, (list, tuple)):
                return [enc(x) for x in v]
            if isinstance(v, dict):
                return {k: enc(x) for k, x in v.items()}
            return v

        doc = {
            "command": self.command,
            "inputs": enc(self.inputs),
            "checks": [
                {
                    "name": c.name,
                    "status": c.status,
                    "hypothesis": c.hypothesis,
                    "details": enc(c.details),
                    "witnesses": [str(w) for w in c.witnesses],
                }
                for c in self.checks
            ],
            "values": enc(self.values),
            "seed": self.seed,
            "overall": self.status,
        }
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
