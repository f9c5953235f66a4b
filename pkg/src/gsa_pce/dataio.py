"""CSV ingestion and emission.

Dialect: comma-separated, mandatory header row, UTF-8, decimal point, no
thousands separators; scientific notation accepted.  Values are written with
repr() so a write/read round trip is exact.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConfigError, DataError
from .ortho import Dataset


def read_csv(
    path,
    input_columns: Sequence[str] | None = None,
    output_column: str | None = None,
) -> Dataset:
    """Load a dataset, selecting input columns in the order given.

    Defaults: the last header column is the output, everything else an input.
    Parse failures name the offending line and column.
    """
    path = Path(path)
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataError(f"{path}: empty file, expected a header row")
        names = [h.strip() for h in header]
        if len(set(names)) != len(names):
            raise DataError(f"{path}: duplicate column names in header")

        if output_column is None:
            output_column = names[-1]
        if input_columns is None:
            input_columns = [c for c in names if c != output_column]
        input_columns = list(input_columns)
        if len(set(input_columns)) != len(input_columns):
            raise ConfigError(f"input columns are not distinct: {input_columns}")
        missing = [c for c in input_columns + [output_column] if c not in names]
        if missing:
            raise ConfigError(f"{path}: columns {missing} not in header {names}")
        if output_column in input_columns:
            raise ConfigError(f"output column {output_column!r} also listed as input")

        positions = [names.index(c) for c in input_columns]
        out_pos = names.index(output_column)
        needed = positions + [out_pos]
        needed_names = input_columns + [output_column]

        rows: list[list[float]] = []
        for lineno, record in enumerate(reader, start=2):
            if not record or all(cell.strip() == "" for cell in record):
                continue
            if len(record) != len(names):
                raise DataError(
                    f"{path}: line {lineno}: expected {len(names)} cells, got {len(record)}"
                )
            parsed = []
            for pos, cname in zip(needed, needed_names):
                cell = record[pos].strip()
                try:
                    value = float(cell)
                except ValueError:
                    raise DataError(
                        f"{path}: line {lineno}, column {cname!r}: "
                        f"not a number: {cell!r}"
                    ) from None
                if not math.isfinite(value):
                    raise DataError(
                        f"{path}: line {lineno}, column {cname!r}: non-finite value {cell!r}"
                    )
                parsed.append(value)
            rows.append(parsed)

    if not rows:
        raise DataError(f"{path}: no data rows")
    data = np.asarray(rows, dtype=np.float64)
    return Dataset(data[:, :-1], data[:, -1], tuple(input_columns) + (output_column,))


def write_csv(ds: Dataset, path) -> None:
    """Write the dataset with full-precision (round-trip exact) numbers."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(ds.column_names)
        for i in range(ds.n_samples):
            writer.writerow(
                [repr(float(v)) for v in ds.inputs[i]] + [repr(float(ds.output[i]))]
            )
