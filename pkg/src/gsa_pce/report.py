"""Structured report documents: assembly, serialization, schema access.

A report is a single JSON object with sections config, diagnostics, indices,
intervals and tables.  Numbers keep full double precision; index entries also
carry a 4-decimal display string.  Nothing time- or host-dependent goes into a
report, so identical runs produce identical bytes.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Sequence

from .errors import DataError
from .indices import IndexEntry, IndexReport

TOOL_NAME = "gsa-pce"
VERSION = "0.1.0"
REPORT_VERSION = "1"


def _display(value: float) -> str:
    return f"{value:.4f}"


def entry_to_dict(entry: IndexEntry, input_names: Sequence[str]) -> dict:
    ordering = [input_names[col] for col in entry.permutation]
    return {
        "index_name": entry.index_name,
        "target": entry.target,
        "value": float(entry.value),
        "raw_value": float(entry.raw_value),
        "display": _display(entry.value),
        "partition": entry.partition,
        "ordering": ordering,
        "denominator": entry.denominator,
        "r_squared": float(entry.r_squared),
        "given": list(entry.given),
    }


def interval_to_dict(
    index_name: str,
    target: str,
    point: float,
    lower: float,
    upper: float,
    level: float,
    protocol: str,
    samples: int,
) -> dict:
    return {
        "index_name": index_name,
        "target": target,
        "point": float(point),
        "lower": float(lower),
        "upper": float(upper),
        "display": f"({lower:.4f}, {upper:.4f})",
        "level": float(level),
        "method": "percentile",
        "protocol": protocol,
        "samples": int(samples),
    }


def build_document(
    config: dict,
    diagnostics: dict,
    indices: list[dict],
    intervals: list[dict] | None = None,
    tables: list[dict] | None = None,
) -> dict:
    return {
        "report_version": REPORT_VERSION,
        "tool": {"name": TOOL_NAME, "version": VERSION},
        "config": config,
        "diagnostics": diagnostics,
        "indices": indices,
        "intervals": intervals or [],
        "tables": tables or [],
    }


def index_report_to_document(
    report: IndexReport, config: dict, intervals: list[dict] | None = None,
    tables: list[dict] | None = None,
) -> dict:
    names = report.diagnostics["input_names"]
    indices = [entry_to_dict(e, names) for e in report.entries]
    return build_document(config, report.diagnostics, indices, intervals, tables)


def write_report(document: dict, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(document, fh, indent=2)
        fh.write("\n")


def load_report(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read report {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{path} is not valid JSON: {exc}") from exc


def load_schema() -> dict:
    text = resources.files("gsa_pce").joinpath("schemas/report.schema.json").read_text()
    return json.loads(text)
