"""Matrix files and canonical JSON output."""

import json
import math

import numpy as np


class MatrixParseError(ValueError):
    """A matrix file is malformed; the message names file, line and column."""


def read_matrix(path):
    """Read a header-free matrix from a CSV or whitespace-separated text file.

    The format is detected per file: any comma on the first data line means
    CSV. Blank lines and lines starting with ``#`` are skipped.
    """
    rows = []
    width = None
    sep = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            if sep is None:
                sep = "," if "," in text else "ws"
            fields = [f.strip() for f in text.split(",")] if sep == "," else text.split()
            values = []
            for col, field in enumerate(fields, start=1):
                try:
                    value = float(field)
                except ValueError:
                    raise MatrixParseError(
                        f"{path}: line {lineno}, column {col}: cannot parse {field!r} as a number"
                    ) from None
                if not math.isfinite(value):
                    raise MatrixParseError(
                        f"{path}: line {lineno}, column {col}: non-finite value {field!r}"
                    )
                values.append(value)
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise MatrixParseError(
                    f"{path}: line {lineno}, column {len(values)}: expected {width} fields, "
                    f"found {len(values)}"
                )
            rows.append(values)
    if not rows:
        raise MatrixParseError(f"{path}: line 1, column 1: file contains no matrix rows")
    return np.array(rows, dtype=np.float64)


def format_matrix(a, delimiter=","):
    """Serialize with 17 significant digits so re-reading is bit-exact."""
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    return "".join(delimiter.join(f"{v:.17g}" for v in row) + "\n" for row in a)


def write_matrix(path, a, delimiter=","):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_matrix(a, delimiter))


def _plain(obj):
    """Convert numpy scalars and non-finite floats to JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return obj


def dumps(obj):
    """Canonical JSON: sorted keys, fixed separators, ``"inf"`` for infinities."""
    return json.dumps(_plain(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"
