"""Writers for coverage reports and single-series inference results."""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from itertools import groupby
from pathlib import Path

from .config import OutputSpec
from .errors import IoError
from .harness import CoverageRecord, CoverageReport
from .infer import InferenceResult
from .intervals import parse_method

REPORT_HEADER = ["design", "rho", "n", "h", "method", "coverage_pct", "mc_se_pct",
                 "median_length", "failed", "seconds"]
INFER_HEADER = ["h", "method", "level", "beta_hat", "se", "lower", "upper"]


def _num(x: float) -> str:
    if isinstance(x, float) and not math.isfinite(x):
        return "nan"
    return format(x, ".17g")


def _json_num(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def report_rows(report: CoverageReport, timing: bool = True) -> list[dict]:
    rows = []
    for r in report.records:
        rows.append({
            "design": r.design,
            "rho": r.rho,
            "n": r.n,
            "h": r.h,
            "method": r.method.value,
            "coverage_pct": r.coverage_pct,
            "mc_se_pct": r.mc_se_pct,
            "median_length": r.median_length,
            "failed": r.failed_replications,
            "seconds": r.wall_time if timing else 0.0,
        })
    return rows


def infer_rows(result: InferenceResult) -> list[dict]:
    return [{"h": r.h, "method": r.method.value, "level": r.level, "beta_hat": r.beta_hat,
             "se": r.se, "lower": r.lower, "upper": r.upper} for r in result.rows]


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_num(row[k]) if isinstance(row[k], float) else row[k] for k in header])
    return buf.getvalue()


def render_table(report: CoverageReport) -> str:
    """Fixed-width coverage table (percent, 2 decimals), one block per design and rho."""
    methods = []
    for r in report.records:
        if r.method not in methods:
            methods.append(r.method)
    width = max(9, max(len(m.value) for m in methods) + 1)
    lines = [f"{'rho':>6} {'h':>4} " + "".join(f"{m.value:>{width}}" for m in methods)]
    rule = "-" * len(lines[0])
    lines.insert(0, rule)
    lines.append(rule)
    recs = sorted(report.records, key=lambda r: (r.design, r.rho, r.h))
    for design, by_design in groupby(recs, key=lambda r: r.design):
        lines.append(f"Design {design}".center(len(rule)))
        lines.append(rule)
        for rho, by_rho in groupby(by_design, key=lambda r: r.rho):
            first = True
            for h, by_h in groupby(by_rho, key=lambda r: r.h):
                cells = {r.method: r for r in by_h}
                rho_txt = f"{rho:.2f}" if first else ""
                first = False
                vals = "".join(
                    f"{cells[m].coverage_pct:>{width}.2f}" if m in cells else " " * width for m in methods
                )
                lines.append(f"{rho_txt:>6} {h:>4} " + vals)
            lines.append(rule)
    return "\n".join(lines)


def render_infer_table(result: InferenceResult) -> str:
    lines = [f"{'h':>4} {'method':>9} {'beta_hat':>11} {'se':>9} {'lower':>11} {'upper':>11}"]
    for r in result.rows:
        lines.append(f"{r.h:>4} {r.method.value:>9} {r.beta_hat:>11.4f} {r.se:>9.4f} "
                     f"{r.lower:>11.4f} {r.upper:>11.4f}")
    return "\n".join(lines)


def _write(path: Path, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write {str(path)!r}: {exc.strerror}") from None


def emit_report(result, output: OutputSpec | None = None, stream=None) -> None:
    """Write a CoverageReport or InferenceResult as CSV/JSON and optionally print a table."""
    output = output or OutputSpec()
    stream = stream or sys.stdout
    if len(result) == 0:
        raise IoError("refusing to write an empty report")
    if isinstance(result, CoverageReport):
        header, rows = REPORT_HEADER, report_rows(result, output.timing)
        table = render_table(result)
    elif isinstance(result, InferenceResult):
        header, rows = INFER_HEADER, infer_rows(result)
        table = render_infer_table(result)
    else:
        raise TypeError(f"cannot emit {type(result).__name__}")

    if output.csv is not None:
        _write(output.csv, _csv_text(header, rows))
    if output.json is not None:
        doc = {"records": [{k: _json_num(v) for k, v in row.items()} for row in rows]}
        _write(output.json, json.dumps(doc, indent=2) + "\n")
    if output.table:
        print(table, file=stream)


def read_report_csv(path) -> list[CoverageRecord]:
    """Parse a CSV written by ``emit_report`` back into coverage records."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != REPORT_HEADER:
            raise IoError(f"unexpected header {reader.fieldnames}")
        out = []
        for row in reader:
            cov = float(row["coverage_pct"]) / 100.0
            se = float(row["mc_se_pct"]) / 100.0
            out.append(CoverageRecord(
                design=int(row["design"]), rho=float(row["rho"]), n=int(row["n"]), h=int(row["h"]),
                method=parse_method(row["method"]), coverage_rate=cov, mc_se=se,
                median_length=float(row["median_length"]), failed_replications=int(row["failed"]),
                wall_time=float(row["seconds"]), replications=-1,
            ))
    return out
