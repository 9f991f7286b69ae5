"""Certification reports: per-property pass/fail rows with witnesses.

A report is an ordered collection of :class:`CheckResult` rows.  Merging is
associative and order-preserving, so campaign cells can be evaluated
independently and combined afterwards.  Serialization is reproducible:
floats are written with 17 significant digits and JSON keys are sorted.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any


def _jsonable(x: Any) -> Any:
    import numpy as np

    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


@dataclass
class CheckResult:
    """One certified property: identifier, parameters, margin, verdict.

    ``margin`` is signed: nonnegative means the inequality held with that
    much room, negative is the worst violation.  ``witness`` records where
    the worst case occurred.  ``prop`` is a human-readable statement of the
    property being certified.
    """

    check_id: str
    prop: str
    params: dict = field(default_factory=dict)
    margin: float = float("nan")
    passed: bool = False
    inconclusive: bool = False
    witness: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def as_row(self) -> dict:
        return {
            "id": self.check_id,
            "prop": self.prop,
            "params": json.dumps(_jsonable(self.params), sort_keys=True),
            "margin": repr(float(self.margin)),
            "pass": str(bool(self.passed)),
            "inconclusive": str(bool(self.inconclusive)),
        }


@dataclass
class CertificationReport:
    rows: list[CheckResult] = field(default_factory=list)

    def add(self, row: CheckResult) -> None:
        self.rows.append(row)

    def extend(self, other: "CertificationReport") -> None:
        self.rows.extend(other.rows)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def any_inconclusive(self) -> bool:
        return any(r.inconclusive for r in self.rows)

    def summary_lines(self) -> list[str]:
        out = []
        for r in self.rows:
            verdict = (
                "INCONCLUSIVE" if r.inconclusive else ("PASS" if r.passed else "FAIL")
            )
            out.append(f"[{verdict:12s}] {r.check_id}  margin={r.margin:.3e}")
        return out

    def write_csv(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        fields = ["id", "prop", "params", "margin", "pass", "inconclusive"]
        with path.open("w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=fields, quoting=csv.QUOTE_MINIMAL)
            w.writeheader()
            for r in self.rows:
                w.writerow(r.as_row())

    def to_json_dict(self) -> dict:
        return {
            "all_passed": self.all_passed,
            "rows": [
                {
                    "id": r.check_id,
                    "prop": r.prop,
                    "params": _jsonable(r.params),
                    "margin": float(r.margin),
                    "pass": bool(r.passed),
                    "inconclusive": bool(r.inconclusive),
                    "witness": _jsonable(r.witness),
                    "details": _jsonable(r.details),
                }
                for r in self.rows
            ],
        }

    def write_json(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w") as fh:
            json.dump(self.to_json_dict(), fh, sort_keys=True, indent=1)
            fh.write("\n")


def write_plotdata(path: str | Path, header: list[str], rows: list[list]) -> None:
    """Delimited plot data, RFC-style quoting, 17-digit floats."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, quoting=csv.QUOTE_MINIMAL)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
