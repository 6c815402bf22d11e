"""UCR-format datasets in, CSV/JSON results out."""

import csv
import json
import math
from io import StringIO
from pathlib import Path

import numpy as np

from .errors import DatasetError
from .evaluation import LabeledDataset


def _parse_label(text, row):
    try:
        value = float(text)
    except ValueError:
        raise DatasetError(f"label {text!r} is not numeric", row=row, column=1) from None
    if not math.isfinite(value) or value != int(value):
        raise DatasetError(f"label {text!r} is not an integer", row=row, column=1)
    return int(value)


def read_ucr_tsv(path, delimiter="\t", name=None):
    """Read a UCR archive file: one series per row, label in the first field.

    Labels are kept verbatim (``-1``/``1`` stays ``-1``/``1``). Rows and
    columns in error messages are 1-based.

    Raises
    ------
    OSError
        If the file cannot be read.
    DatasetError
        On an empty file, ragged rows, non-numeric fields or missing values.
    """
    path = Path(path)
    text = path.read_text()
    rows = [line for line in text.splitlines() if line.strip()]
    if not rows:
        raise DatasetError(f"{path}: no data rows")
    labels, values, width, nan_rows = [], [], None, []
    for r, line in enumerate(rows, start=1):
        fields = line.strip().split(delimiter) if delimiter != " " else line.split()
        if width is None:
            width = len(fields)
            if width < 2:
                raise DatasetError(f"{path}: need a label and at least one value", row=r)
        elif len(fields) != width:
            raise DatasetError(f"{path}: expected {width} fields, found {len(fields)}", row=r)
        labels.append(_parse_label(fields[0], r))
        vals = []
        for c, f in enumerate(fields[1:], start=2):
            try:
                vals.append(float(f))
            except ValueError:
                raise DatasetError(f"{path}: field {f!r} is not numeric", row=r, column=c) from None
        if not all(math.isfinite(v) for v in vals):
            nan_rows.append(r)
        values.append(vals)
    if nan_rows:
        shown = ", ".join(str(r) for r in nan_rows[:20])
        more = "" if len(nan_rows) <= 20 else f" and {len(nan_rows) - 20} more"
        raise DatasetError(f"{path}: missing or non-finite values in rows {shown}{more}")
    return LabeledDataset(np.array(values), np.array(labels), name or path.stem)


def write_dataset(data, path, delimiter="\t"):
    """Write ``data`` in the same label-first format :func:`read_ucr_tsv` reads."""
    with open(path, "w") as fh:
        for label, row in zip(data.labels, data.series):
            fh.write(delimiter.join([str(int(label))] + [repr(float(v)) for v in row]) + "\n")


def write_json(obj, path=None):
    """Serialise with sorted keys; returns the text and writes it if ``path`` is given."""
    text = json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def write_csv(rows, fields, path=None):
    """Write dict rows as CSV; returns the text and writes it if ``path`` is given."""
    buf = StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: row[k] for k in fields})
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text
