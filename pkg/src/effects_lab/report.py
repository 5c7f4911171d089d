"""Check records and their text/JSON rendering."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable

PASS = "pass"
FAIL = "fail"
INFO = "info"


@dataclass
class Record:
    check: str
    verdict: str
    witness: Any = None
    seed: int | None = None
    details: dict = field(default_factory=dict)
    elapsed: float | None = None

    @property
    def ok(self) -> bool:
        return self.verdict != FAIL

    def to_dict(self, timing: bool = False) -> dict:
        out = {"check": self.check, "verdict": self.verdict, "witness": self.witness, "seed": self.seed}
        if self.details:
            out["details"] = self.details
        if timing and self.elapsed is not None:
            out["elapsed"] = round(self.elapsed, 3)
        return out


def record(check: str, ok: bool, witness=None, seed=None, **details) -> Record:
    return Record(check, PASS if ok else FAIL, witness, seed, details)


def info(check: str, witness=None, seed=None, **details) -> Record:
    return Record(check, INFO, witness, seed, details)


class Report:
    def __init__(self, title: str, records: Iterable[Record] = ()):
        self.title = title
        self.records: list[Record] = list(records)
        self.elapsed: float | None = None

    def add(self, rec: Record) -> Record:
        self.records.append(rec)
        return rec

    def extend(self, recs: Iterable[Record]) -> None:
        self.records.extend(recs)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.records)

    @property
    def failures(self) -> list[Record]:
        return [r for r in self.records if not r.ok]

    def to_json(self, timing: bool = False) -> str:
        body = {
            "report": self.title,
            "verdict": "pass" if self.ok else "fail",
            "records": [r.to_dict(timing) for r in self.records],
        }
        if timing and self.elapsed is not None:
            body["elapsed"] = round(self.elapsed, 3)
        return json.dumps(body, indent=2, ensure_ascii=False)

    def to_text(self, timing: bool = False) -> str:
        lines = [f"== {self.title} =="]
        for r in self.records:
            head = f"[{r.verdict.upper():4}] {r.check}"
            if r.seed is not None:
                head += f"  (seed {r.seed})"
            if timing and r.elapsed is not None:
                head += f"  {r.elapsed:.3f}s"
            lines.append(head)
            for k, v in r.details.items():
                lines.append(f"    {k}: {_text(v)}")
            if r.witness is not None:
                lines.append(f"    witness: {_text(r.witness)}")
        lines.append(f"verdict: {'pass' if self.ok else 'fail'}")
        if timing and self.elapsed is not None:
            lines.append(f"elapsed: {self.elapsed:.3f}s")
        return "\n".join(lines)


def _text(v) -> str:
    if isinstance(v, (list, tuple)):
        return "; ".join(_text(e) for e in v)
    if isinstance(v, dict):
        return ", ".join(f"{k}={_text(x)}" for k, x in v.items())
    return str(v)
