"""Deterministic file output: CSV tables with a comment header and JSON reports."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from . import __version__


def header_lines(config_hash: str, units: str, description: str = "") -> list[str]:
    lines = [f"# pemdamp {__version__}", f"# config-sha256: {config_hash}", f"# units: {units}"]
    if description:
        lines.append(f"# {description}")
    return lines


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.12g}"


def write_csv(path, columns: list[str], rows, config_hash: str, units: str, description: str = "") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = header_lines(config_hash, units, description)
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isfinite(v):
            return v
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    return obj


def write_report(path, payload: dict, config_hash: str, units: str) -> Path:
    """JSON document whose ``header`` block mirrors the CSV comment header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {"header": {"toolkit": f"pemdamp {__version__}", "config_sha256": config_hash, "units": units}}
    doc.update(_jsonable(payload))
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def write_text(path, text: str, config_hash: str, units: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    body = "\n".join(header_lines(config_hash, units)) + "\n" + text
    path.write_text(body, encoding="utf-8")
    return path
