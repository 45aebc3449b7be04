"""Deterministic report assembly and rendering.

Reports carry a fixed schema: config and body are fully deterministic
for a given job configuration; wall-clock timings live in a separate
section so machine comparison can strip them.
"""

import json
from fractions import Fraction

import numpy as np

SCHEMA_VERSION = 1


def sanitize(obj):
    """Recursively convert to JSON-serializable deterministic values."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return float(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.complexfloating):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.ndarray):
        return sanitize(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted((sanitize(v) for v in obj), key=repr)
    return str(obj)


def assemble(kind, config, body, timings):
    return {
        "schema": SCHEMA_VERSION,
        "kind": kind,
        "config": sanitize(config),
        "body": sanitize(body),
        "timings": sanitize(timings),
    }


def strip_timings(report):
    """Copy without the timing section (the determinism comparand)."""
    return {k: v for k, v in report.items() if k != "timings"}


def render_json(report):
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def _text_lines(obj, indent, out):
    pad = "  " * indent
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)):
                out.append(f"{pad}{k}:")
                _text_lines(v, indent + 1, out)
            else:
                out.append(f"{pad}{k}: {v}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            if isinstance(v, (dict, list)):
                out.append(f"{pad}- [{i}]")
                _text_lines(v, indent + 1, out)
            else:
                out.append(f"{pad}- {v}")
    else:
        out.append(f"{pad}{obj}")


def render_text(report):
    out = [f"gkzflop report: {report['kind']} (schema {report['schema']})"]
    status = report["body"].get("pass") if isinstance(report["body"], dict) \
        else None
    if status is not None:
        out.append(f"status: {'pass' if status else 'FAIL'}")
    out.append("config:")
    _text_lines(report["config"], 1, out)
    out.append("body:")
    _text_lines(report["body"], 1, out)
    out.append("timings:")
    _text_lines(report["timings"], 1, out)
    return "\n".join(out) + "\n"


def render(report, fmt):
    if fmt == "text":
        return render_text(report)
    return render_json(report)
