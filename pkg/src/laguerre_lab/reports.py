"""Residual bookkeeping shared by the verification layers and the CLI.

A ``Check`` is one verified identity at one point: an id from the
registry, the absolute (or normalized) residual, and the tolerance it
was held to.  Suites collect checks into ``ResidualReport`` objects that
serialize to the JSON/CSV formats of the command-line surface.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from mpmath import mp, mpf

#: significant digits used when rendering numbers into reports
REPORT_DIGITS = 30


def render(x) -> str:
    """Decimal-string rendering used in all reports (never binary floats)."""
    if x is None:
        return ""
    with mp.workdps(REPORT_DIGITS + 10):
        return mp.nstr(mpf(x) if not isinstance(x, mpf) else x, REPORT_DIGITS)


@dataclass(frozen=True)
class Check:
    """One identity residual at one evaluation point."""

    id: str
    residual: mpf
    tol: mpf
    point: str = ""

    @property
    def ok(self) -> bool:
        return bool(self.residual <= self.tol)

    def entry(self) -> dict:
        return {
            "id": self.id,
            "point": self.point,
            "residual": render(self.residual),
            "tolerance": render(self.tol),
            "pass": self.ok,
        }


@dataclass
class ResidualReport:
    """All checks of one suite plus run metadata."""

    suite: str
    entries: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def add(self, check: Check):
        self.entries.append(check)

    def extend(self, checks):
        self.entries.extend(checks)

    @property
    def n_failed(self) -> int:
        return sum(1 for c in self.entries if not c.ok)

    @property
    def all_pass(self) -> bool:
        return self.n_failed == 0

    def as_dict(self, timestamp=None) -> dict:
        meta = dict(sorted(self.metadata.items()))
        if timestamp is not None:
            meta["timestamp"] = timestamp
        return {
            "suite": self.suite,
            "entries": [c.entry() for c in self.entries],
            "metadata": meta,
        }

    def to_json(self, timestamp=None) -> str:
        return json.dumps(self.as_dict(timestamp), indent=2, sort_keys=True)

    def csv_rows(self):
        yield ["suite", "id", "point", "residual", "tolerance", "pass"]
        for c in self.entries:
            e = c.entry()
            yield [self.suite, e["id"], e["point"], e["residual"], e["tolerance"], str(e["pass"])]
