"""Structured verification reports with exact-rational comparison rows.

Every asserted inequality carries both sides as exact strings, so a
report is self-auditing.  Rows are either asserted (they decide the exit
status) or reported (informational comparisons that never fail a run).
Timing fields are measured honestly and are the only nondeterministic
content; serialisation can strip them so repeated runs compare equal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .numeric import Rat, rat_str

__all__ = ["CheckRow", "Table", "Report", "fmt_value"]


def fmt_value(value) -> str:
    """Exact string form: rationals as p/q, everything else via str."""
    if isinstance(value, Fraction):
        return rat_str(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


_OPS = {
    "<=": lambda a, b: a <= b,
    "<": lambda a, b: a < b,
    "==": lambda a, b: a == b,
    ">=": lambda a, b: a >= b,
    ">": lambda a, b: a > b,
}


@dataclass
class CheckRow:
    label: str
    asserted: bool
    ok: bool
    lhs: str
    op: str
    rhs: str
    note: str = ""

    def to_json(self) -> dict:
        data = {
            "label": self.label,
            "asserted": self.asserted,
            "ok": self.ok,
            "lhs": self.lhs,
            "op": self.op,
            "rhs": self.rhs,
        }
        if self.note:
            data["note"] = self.note
        return data


@dataclass
class Table:
    name: str
    columns: list[str]
    rows: list[list[str]] = field(default_factory=list)

    def to_csv(self) -> str:
        lines = [",".join(self.columns)]
        lines += [",".join(row) for row in self.rows]
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {"name": self.name, "columns": self.columns, "rows": self.rows}


@dataclass
class Report:
    command: str
    parameters: dict
    checks: list[CheckRow] = field(default_factory=list)
    values: dict = field(default_factory=dict)
    tables: list[Table] = field(default_factory=list)
    traces: list[dict] = field(default_factory=list)
    infeasible: list[str] = field(default_factory=list)
    runtime_ms: int = 0

    def check(self, label: str, lhs, op: str, rhs, note: str = "") -> bool:
        """Asserted comparison; failing rows fail the run."""
        ok = bool(_OPS[op](lhs, rhs))
        self.checks.append(
            CheckRow(label, True, ok, fmt_value(lhs), op, fmt_value(rhs), note)
        )
        return ok

    def check_that(self, label: str, ok: bool, detail: str = "", note: str = "") -> bool:
        """Asserted predicate without a numeric comparison."""
        self.checks.append(
            CheckRow(label, True, bool(ok), detail or fmt_value(ok), "is", "true", note)
        )
        return bool(ok)

    def compare(self, label: str, lhs, op: str, rhs, note: str = "") -> bool:
        """Reported-only comparison; never affects the exit status."""
        ok = bool(_OPS[op](lhs, rhs))
        self.checks.append(
            CheckRow(label, False, ok, fmt_value(lhs), op, fmt_value(rhs), note)
        )
        return ok

    def value(self, name: str, value) -> None:
        self.values[name] = fmt_value(value)

    def cap(self, message: str) -> None:
        self.infeasible.append(message)

    @property
    def ok(self) -> bool:
        return all(row.ok for row in self.checks if row.asserted)

    def exit_code(self) -> int:
        if not self.ok:
            return 1
        if self.infeasible:
            return 2
        return 0

    def to_json(self, timings: bool = True) -> dict:
        data = {
            "command": self.command,
            "parameters": self.parameters,
            "ok": self.ok,
            "checks": [row.to_json() for row in self.checks],
            "values": self.values,
            "tables": [t.to_json() for t in self.tables],
            "traces": self.traces,
            "infeasible": self.infeasible,
        }
        if timings:
            data["runtime_ms"] = self.runtime_ms
        return data

    def json_text(self, timings: bool = True) -> str:
        return json.dumps(self.to_json(timings), indent=2) + "\n"

    def to_text(self) -> str:
        lines = [f"[{self.command}] {json.dumps(self.parameters)}"]
        for row in self.checks:
            if row.asserted:
                tag, verdict = ("PASS", "") if row.ok else ("FAIL", "")
            else:
                tag = "info"
                verdict = " [holds]" if row.ok else " [fails]"
            note = f"  ({row.note})" if row.note else ""
            lines.append(
                f"  {tag} {row.label}: {row.lhs} {row.op} {row.rhs}{verdict}{note}"
            )
        for name, val in self.values.items():
            lines.append(f"  value {name} = {val}")
        for msg in self.infeasible:
            lines.append(f"  INFEASIBLE {msg}")
        lines.append(
            f"  => {'ok' if self.ok else 'FAILED'} "
            f"({sum(1 for r in self.checks if r.asserted)} asserted checks, "
            f"{self.runtime_ms} ms)"
        )
        return "\n".join(lines)
