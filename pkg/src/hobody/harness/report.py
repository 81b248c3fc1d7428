"""Suite rows and machine-readable output."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

PROVENANCE = ("paper-constant", "derived-closed-form", "derived-oracle", "mc-reference")
COLUMNS = ("suite", "body", "n", "m", "value", "std_error", "reference", "provenance", "pass", "wall_ms")


@dataclass(frozen=True)
class Row:
    suite: str
    body: str
    n: int
    m: int
    value: float
    std_error: float
    reference: float
    provenance: str
    passed: bool
    wall_ms: float
    check: str = ""
    tolerance: float = float("nan")

    def __post_init__(self):
        if self.provenance not in PROVENANCE:
            raise ValueError(f"unknown provenance tag {self.provenance!r}")

    def as_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return {k: (None if isinstance(v, float) and not math.isfinite(v) else v) for k, v in d.items()}


@dataclass
class SuiteReport:
    suite: str
    n: int
    m: int
    seed: int
    samples: int
    rows: list[Row] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def failures(self) -> list[Row]:
        return [r for r in self.rows if not r.passed]

    def to_json(self) -> str:
        doc = {"suite": self.suite, "n": self.n, "m": self.m, "seed": self.seed, "samples": self.samples,
               "passed": self.passed, "rows": [r.as_dict() for r in self.rows]}
        return json.dumps(doc, indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in self.rows:
            body = f"{r.body}[{r.check}]" if r.check else r.body
            w.writerow([r.suite, body, r.n, r.m, repr(r.value), repr(r.std_error), repr(r.reference),
                        r.provenance, str(r.passed).lower(), f"{r.wall_ms:.1f}"])
        return buf.getvalue()

    def table(self) -> str:
        lines = [f"{'body':<28} {'check':<22} {'value':>14} {'+-':>10} {'reference':>14}  pass"]
        for r in self.rows:
            lines.append(f"{r.body:<28} {r.check:<22} {r.value:>14.8g} {r.std_error:>10.3g} "
                         f"{r.reference:>14.8g}  {'ok' if r.passed else 'FAIL'}")
        return "\n".join(lines)


def emit_report(report: SuiteReport, fmt: str, path: str | Path) -> Path:
    if fmt not in ("json", "csv"):
        raise ValueError(f"unknown format {fmt!r}")
    text = report.to_json() if fmt == "json" else report.to_csv()
    p = Path(path)
    p.write_text(text)  # OSError propagates to the caller
    return p


def load_json_report(path: str | Path) -> SuiteReport:
    doc = json.loads(Path(path).read_text())
    rep = SuiteReport(doc["suite"], doc["n"], doc["m"], doc["seed"], doc["samples"])
    for d in doc["rows"]:
        d = dict(d)
        d["passed"] = d.pop("pass")
        for k in ("value", "std_error", "reference", "tolerance"):
            if d.get(k) is None:
                d[k] = float("nan")
        rep.rows.append(Row(**d))
    return rep
