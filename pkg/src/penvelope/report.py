"""Verification reports: named clauses with first witnesses."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class Clause:
    name: str
    ok: bool = True
    violations: int = 0
    witness: Any = None
    detail: str = ""

    def to_dict(self) -> dict:
        d = {"name": self.name, "ok": self.ok}
        if not self.ok:
            d["violations"] = self.violations
            d["witness"] = self.witness
        if self.detail:
            d["detail"] = self.detail
        return d


@dataclass
class Report:
    """Ordered collection of clauses.

    Clauses are registered in evaluation order; ``fail`` keeps only the
    first witness seen for a clause and counts the rest, so witnesses are
    the lexicographically first ones whenever callers loop in basis and
    group order.
    """

    subject: str = ""
    clauses: dict[str, Clause] = field(default_factory=dict)

    def clause(self, name: str) -> Clause:
        if name not in self.clauses:
            self.clauses[name] = Clause(name)
        return self.clauses[name]

    def passed(self, name: str, detail: str = "") -> None:
        c = self.clause(name)
        if detail:
            c.detail = detail

    def fail(self, name: str, witness: Any = None, detail: str = "") -> None:
        c = self.clause(name)
        if c.ok:
            c.ok = False
            c.witness = witness
            if detail:
                c.detail = detail
        c.violations += 1

    def check(self, name: str, condition: bool, witness: Any = None, detail: str = "") -> bool:
        if condition:
            self.clause(name)
        else:
            self.fail(name, witness, detail)
        return condition

    def merge(self, other: Report, prefix: str = "") -> None:
        for name, c in other.clauses.items():
            key = prefix + name
            if key in self.clauses:
                mine = self.clauses[key]
                if mine.ok and not c.ok:
                    self.clauses[key] = Clause(key, c.ok, c.violations, c.witness, c.detail)
                elif not c.ok:
                    mine.violations += c.violations
            else:
                self.clauses[key] = Clause(key, c.ok, c.violations, c.witness, c.detail)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.clauses.values())

    def failures(self) -> list[Clause]:
        return [c for c in self.clauses.values() if not c.ok]

    def failed_names(self) -> list[str]:
        return [c.name for c in self.failures()]

    def __bool__(self):
        return self.ok

    def to_dict(self) -> dict:
        d = {"ok": self.ok, "clauses": [c.to_dict() for c in self.clauses.values()]}
        if self.subject:
            d["subject"] = self.subject
        return d

    def render(self) -> str:
        lines = []
        if self.subject:
            lines.append(self.subject)
        for c in self.clauses.values():
            status = "PASS" if c.ok else "FAIL"
            line = f"  [{status}] {c.name}"
            if not c.ok:
                line += f" ({c.violations} violation{'s' if c.violations != 1 else ''}; witness {c.witness})"
            if c.detail:
                line += f": {c.detail}"
            lines.append(line)
        return "\n".join(lines)
