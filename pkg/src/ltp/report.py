"""Check outcomes and machine-readable suite reports.

The JSON schema is fixed: {version, spec, seed, checks:[{name, paper_ref,
status, observed, expected, tolerance, runtime_ms, notes}], summary:{pass,
fail, skipped}}.  Emission is byte-deterministic for fixed inputs; wall-clock
timings are therefore opt-in (runtime_ms is 0 unless timings were requested).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped"


def _to_plain(value):
    if isinstance(value, (list, tuple)):
        return [_to_plain(v) for v in value]
    if value is None:
        return None
    if isinstance(value, bool):
        return value
    if isinstance(value, (int,)):
        return int(value)
    return float(value)


@dataclass
class CheckResult:
    """One named check: observed vs expected vs tolerance.

    ``expected`` may be a scalar (pass iff |observed - expected| <= tolerance)
    or a two-element interval [lo, hi] (pass iff observed lies inside, with
    the tolerance widening both ends).  ``observed`` may be a scalar or pair.
    """

    name: str
    paper_ref: str
    status: str
    observed: object
    expected: object
    tolerance: float
    runtime_ms: float = 0.0
    notes: str = ""

    @classmethod
    def build(cls, name: str, paper_ref: str, *, observed, expected,
              tolerance: float, notes: str = "", runtime_ms: float = 0.0) -> "CheckResult":
        status = PASS if cls.evaluate(observed, expected, tolerance) else FAIL
        return cls(name, paper_ref, status, _to_plain(observed),
                   _to_plain(expected), float(tolerance), float(runtime_ms), notes)

    @classmethod
    def skip(cls, name: str, paper_ref: str, reason: str) -> "CheckResult":
        return cls(name, paper_ref, SKIPPED, None, None, 0.0, 0.0, reason)

    @staticmethod
    def evaluate(observed, expected, tolerance: float) -> bool:
        if isinstance(expected, (list, tuple)):
            lo, hi = expected
            return (lo - tolerance) <= observed <= (hi + tolerance)
        obs = observed if not isinstance(observed, (list, tuple)) else max(
            abs(o - expected) for o in observed) + expected
        return abs(obs - expected) <= tolerance

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "paper_ref": self.paper_ref,
            "status": self.status,
            "observed": _to_plain(self.observed),
            "expected": _to_plain(self.expected),
            "tolerance": float(self.tolerance),
            "runtime_ms": float(self.runtime_ms),
            "notes": self.notes,
        }


@dataclass
class SuiteReport:
    """Aggregated run of the theorem suite over one model."""

    version: str
    spec: str
    seed: int
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def summary(self) -> dict:
        counts = {PASS: 0, FAIL: 0, SKIPPED: 0}
        for check in self.checks:
            counts[check.status] += 1
        return {"pass": counts[PASS], "fail": counts[FAIL], "skipped": counts[SKIPPED]}

    @property
    def ok(self) -> bool:
        return self.summary["fail"] == 0

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "spec": self.spec,
            "seed": int(self.seed),
            "checks": [c.to_dict() for c in self.checks],
            "summary": self.summary,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        header = ["name", "paper_ref", "status", "observed", "expected",
                  "tolerance", "runtime_ms", "notes"]
        writer.writerow(header)
        for check in self.checks:
            row = check.to_dict()
            writer.writerow([_flat(row[key]) for key in header])
        return buffer.getvalue()

    def to_markdown(self) -> str:
        lines = [f"# Suite report: {self.spec}",
                 "",
                 f"version {self.version}, seed {self.seed}",
                 "",
                 "| name | status | observed | expected | tolerance | notes |",
                 "| --- | --- | --- | --- | --- | --- |"]
        for check in self.checks:
            lines.append("| {} | {} | {} | {} | {} | {} |".format(
                check.name, check.status, _flat(check.observed),
                _flat(check.expected), _flat(check.tolerance),
                check.notes.replace("|", "/")))
        s = self.summary
        lines += ["", f"pass {s['pass']}, fail {s['fail']}, skipped {s['skipped']}", ""]
        return "\n".join(lines)


def _flat(value) -> str:
    if value is None:
        return ""
    if isinstance(value, list):
        return ";".join(_flat(v) for v in value)
    return repr(value) if isinstance(value, float) else str(value)


FORMATS = ("json", "csv", "markdown")


def emit_report(report: SuiteReport, path: str, fmt: str = "json") -> None:
    """Write the report to ``path`` in the requested format."""
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {fmt!r}")
    if fmt == "json":
        text = report.to_json() + "\n"
    elif fmt == "csv":
        text = report.to_csv()
    else:
        text = report.to_markdown()
    try:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)
    except OSError as exc:
        raise IOError(f"cannot write report to {path!r}: {exc}") from exc
