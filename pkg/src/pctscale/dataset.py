"""In-memory rectangular tables and delimited-text ingestion."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import EmptyFile, ParseError, UnknownColumn

MISSING_MARKERS = frozenset({"", "NA"})


def _as_column(name, values):
    arr = np.asarray(values)
    if arr.ndim != 1:
        raise ValueError(f"column {name!r} must be one-dimensional")
    if arr.dtype.kind in "biuf":
        arr = arr.astype(float)
        if np.isinf(arr).any():
            raise ValueError(f"column {name!r} contains infinite values")
        return arr
    # Categorical: strings with None marking missing cells.
    out = np.empty(len(arr), dtype=object)
    for i, v in enumerate(arr):
        if v is None or (isinstance(v, float) and math.isnan(v)):
            out[i] = None
        else:
            out[i] = str(v)
    return out


@dataclass(frozen=True)
class Dataset:
    """Named columns of equal length.

    Numeric columns are float arrays with NaN for missing cells. Categorical
    columns are object arrays of strings with None for missing cells.
    """

    columns: Mapping[str, np.ndarray]
    source_id: str = ""
    _n_rows: int = field(init=False, repr=False, default=0)

    def __post_init__(self):
        cols = {str(k): _as_column(k, v) for k, v in dict(self.columns).items()}
        lengths = {len(v) for v in cols.values()}
        if len(lengths) > 1:
            raise ValueError(f"columns have unequal lengths: {sorted(lengths)}")
        for arr in cols.values():
            arr.setflags(write=False)
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "_n_rows", lengths.pop() if lengths else 0)

    @property
    def n_rows(self) -> int:
        return self._n_rows

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.columns)

    def __getitem__(self, name) -> np.ndarray:
        try:
            return self.columns[name]
        except KeyError:
            raise UnknownColumn(name) from None

    def __contains__(self, name) -> bool:
        return name in self.columns

    def is_numeric(self, name) -> bool:
        return self[name].dtype.kind == "f"


def _parse_number(text):
    try:
        value = float(text)
    except ValueError:
        return None
    return value if math.isfinite(value) else None


def load_csv(
    path,
    delimiter: str = ",",
    categorical: Iterable[str] = (),
) -> Dataset:
    """Read a delimited text file with a header row into a :class:`Dataset`.

    Empty cells and ``NA`` are missing. A column is numeric when every
    present cell parses as a finite decimal number (decimal point only, no
    locale handling); a column with no numeric cells is categorical. Columns
    named in ``categorical`` are always read as text. Any other mixture is a
    :class:`ParseError` naming the first offending cell (1-based data row).
    """
    path = Path(path)
    categorical = set(categorical)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh, delimiter=delimiter))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if not rows:
        raise EmptyFile(f"{path}: no header row")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    if not body:
        raise EmptyFile(f"{path}: header present but no data rows")
    if len(set(header)) != len(header) or any(not h for h in header):
        raise ParseError("header has empty or duplicate column names", row=0)

    raw = {h: [] for h in header}
    for i, row in enumerate(body, start=1):
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, found {len(row)}", row=i)
        for h, cell in zip(header, row):
            cell = cell.strip()
            raw[h].append(None if cell in MISSING_MARKERS else cell)

    columns = {}
    for h in header:
        cells = raw[h]
        if h in categorical:
            columns[h] = np.array(cells, dtype=object)
            continue
        parsed = [None if c is None else _parse_number(c) for c in cells]
        n_text = sum(1 for c, p in zip(cells, parsed) if c is not None and p is None)
        n_num = sum(1 for p in parsed if p is not None)
        if n_text and n_num:
            i = next(i for i, (c, p) in enumerate(zip(cells, parsed)) if c is not None and p is None)
            raise ParseError(f"cannot parse {cells[i]!r} as a number", row=i + 1, column=h)
        if n_text:
            columns[h] = np.array(cells, dtype=object)
        else:
            columns[h] = np.array([np.nan if p is None else p for p in parsed], dtype=float)
    return Dataset(columns, source_id=str(path))
