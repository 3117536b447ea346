"""Structured (JSON) reports and their one-page text rendering."""

from __future__ import annotations

import json
import math
from fractions import Fraction

import numpy as np

SCHEMA_VERSION = "frobspec.report/1"


def jsonable(obj):
    """Recursively convert numpy scalars, complex numbers and fractions."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return int(obj) if obj.denominator == 1 else str(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def dumps(report: dict) -> str:
    return json.dumps(jsonable(report), sort_keys=True, indent=2) + "\n"


def render_text(report: dict) -> str:
    """Human-readable summary of a report produced by the CLI."""
    lines = [f"frobspec {report.get('command', '')}: {report.get('status', '')}"]
    inp = report.get("input", {})
    for key in ("spectrum", "polynomial", "matrix_file", "directory"):
        if key in inp:
            lines.append(f"  {key}: {inp[key]}")
    if "canonical" in inp:
        lines.append(f"  canonical spectrum: {inp['canonical']}")
    analysis = report.get("analysis")
    if analysis:
        lines.extend(_render_analysis(analysis))
    for name, suite in report.get("suites", {}).items():
        lines.append(f"[{name}] {suite['status']}")
        for v in suite["verdicts"]:
            lines.append(f"  {v['condition_id']:<28} {v['label']:<32} {v['witness']}")
    for name, cons in report.get("constructions", {}).items():
        lines.append(f"[{name}] {cons.get('status', '')}")
        for key in sorted(cons):
            if key in ("status", "matrix", "claimed_spectrum"):
                continue
            lines.append(f"  {key}: {cons[key]}")
        if cons.get("matrix_text"):
            lines.append("  matrix:")
            lines.extend("    " + ln for ln in cons["matrix_text"].splitlines())
    batch = report.get("batch")
    if batch:
        lines.append(f"[batch] {batch['counts']}")
        for entry in batch["entries"]:
            lines.append(f"  {entry['file']:<32} {entry['status']}")
    for err in report.get("errors", []):
        lines.append(f"  error: {err}")
    lines.append(f"exit status {report.get('exit_code')}")
    return "\n".join(lines) + "\n"


def _render_analysis(a: dict) -> list[str]:
    out = [
        f"  order {a['order']}, integral={a['integral']}, irreducible={a['irreducible']}, "
        f"period={a['period']}, primitive={a['primitive']}"
    ]
    if a.get("nonzero_spectrum_text"):
        out.append(f"  nonzero spectrum: {a['nonzero_spectrum_text']} ({a['zeros_removed']} zero eigenvalues removed)")
    return out
