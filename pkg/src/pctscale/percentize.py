"""Scale transformations onto percent and percentage scales.

Three affine maps live here:

* :func:`to_percent_scale` puts a score on 0-100 given the scale's min and max;
* :func:`min_max_normalize` is the general map from any source range onto any
  target range;
* :func:`percentize_value` maps a score onto a 0-1 percentage scale using the
  conceptual anchors ``c_n`` and ``c_x`` (or onto the anchor's target range).

The scalar functions accept numpy arrays as well and return an array in that
case. NaN passes through untouched.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .dataset import Dataset
from .errors import DegenerateAnchor, MissingAnchor, ParseError, UnknownCategory, UnknownColumn
from .scales import Kind, ScaleAnchor, VariableSpec

# Method labels recorded in transform logs.
PERCENT = "percent"  # 0-100 from scale min/max
MINMAX = "minmax"  # general source -> target range
PERCENTAGE = "percentage"  # 0-1 from conceptual anchors
DUMMY = "dummy"


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def _require_range(lo, hi, what):
    if not hi > lo:
        raise DegenerateAnchor(f"{what} range ({lo:g}, {hi:g}) has no width")


def to_percent_scale(value, min, max):
    """``(value - min) / (max - min) * 100``.

    >>> to_percent_scale(7.5, 0, 10)
    75.0
    """
    _require_range(min, max, "source")
    return _out((np.asarray(value, dtype=float) - min) / (max - min) * 100)


def min_max_normalize(value, min_o, max_o, min_n, max_n):
    """Map ``value`` from ``[min_o, max_o]`` onto ``[min_n, max_n]``."""
    _require_range(min_o, max_o, "source")
    _require_range(min_n, max_n, "target")
    v = np.asarray(value, dtype=float)
    return _out((v - min_o) / (max_o - min_o) * (max_n - min_n) + min_n)


def percentize_value(value, anchor: ScaleAnchor):
    """Percentize raw score(s) against a conceptual anchor.

    The ratio ``(value - c_n) / (c_x - c_n)`` is computed directly so that
    ``c_n`` and ``c_x`` land exactly on the target endpoints. Values outside
    the anchor map outside the target range; nothing is clamped.
    """
    v = np.asarray(value, dtype=float)
    ratio = (v - anchor.c_n) / (anchor.c_x - anchor.c_n)
    if anchor.target == (0.0, 1.0):
        return _out(ratio)
    scaled = anchor.target_min + ratio * anchor.target_span
    return _out(np.where(ratio == 1.0, anchor.target_max, scaled))


def unpercentize_value(value, anchor: ScaleAnchor):
    """Inverse of :func:`percentize_value`."""
    v = np.asarray(value, dtype=float)
    ratio = (v - anchor.target_min) / anchor.target_span
    raw = anchor.c_n + ratio * anchor.span
    return _out(np.where(ratio == 1.0, anchor.c_x, raw))


def format_percent(value: float, precision: int = 1) -> str:
    """Render a percentage-scale value as a percent string.

    >>> format_percent(0.87)
    '87.0%'
    >>> format_percent(-0.25)
    '-25.0%'
    """
    text = f"{value * 100:.{precision}f}"
    if text.startswith("-") and float(text) == 0:
        text = text[1:]
    return text + "%"


@dataclass(frozen=True)
class TransformRecord:
    """One applied transform.

    ``rows`` is the half-open row range the transform covered; pooled data
    carries one record per part for each column.
    """

    column: str
    source: str
    method: str
    anchor: Optional[ScaleAnchor] = None
    category: Optional[str] = None
    rows: tuple[int, int] = (0, 0)
    part: Optional[str] = None

    def describe(self) -> str:
        where = f" [{self.part}]" if self.part is not None else ""
        if self.method == DUMMY:
            if self.category is None:
                return f"{self.column}{where}: binary 0/1 pass-through of {self.source}"
            return f"{self.column}{where}: 1 if {self.source} == {self.category!r} else 0"
        a = self.anchor
        if a is None:
            return f"{self.column}{where}: 1-based part index"
        return (
            f"{self.column}{where}: {self.method} ({self.source} - {a.c_n:g}) / "
            f"({a.c_x:g} - {a.c_n:g}) -> [{a.target_min:g}, {a.target_max:g}]"
        )


@dataclass(frozen=True)
class PercentizedDataset:
    columns: dict
    transform_log: tuple
    source_id: str = ""

    def __post_init__(self):
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) > 1:
            raise ValueError("columns have unequal lengths")
        for arr in self.columns.values():
            arr.setflags(write=False)

    @property
    def n_rows(self) -> int:
        return len(next(iter(self.columns.values()))) if self.columns else 0

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

    def records(self, column) -> list[TransformRecord]:
        return [r for r in self.transform_log if r.column == column]

    def anchor_of(self, column) -> Optional[ScaleAnchor]:
        """The column's anchor when a single one applies to every row."""
        anchors = {r.anchor for r in self.records(column)}
        return anchors.pop() if len(anchors) == 1 else None

    def is_dummy(self, column) -> bool:
        recs = self.records(column)
        return bool(recs) and all(r.method == DUMMY for r in recs)

    def inverse(self, column) -> np.ndarray:
        """Reconstruct raw values of an anchored column."""
        values = self[column]
        out = np.array(values, dtype=float)
        for rec in self.records(column):
            if rec.anchor is None:
                continue
            lo, hi = rec.rows
            out[lo:hi] = unpercentize_value(values[lo:hi], rec.anchor)
        return out


def _method_for(anchor: ScaleAnchor) -> str:
    if anchor.target == (0.0, 1.0):
        return PERCENTAGE
    if anchor.target == (0.0, 100.0):
        return PERCENT
    return MINMAX


def _numeric(data: Dataset, spec: VariableSpec) -> np.ndarray:
    col = data[spec.name]
    if col.dtype.kind != "f":
        raise ParseError("declared numerical but holds text", column=spec.name)
    return col


def _code_binary(data: Dataset, spec: VariableSpec):
    col = data[spec.name]
    if spec.categories:
        labels = spec.categories
        other = labels[1] if labels[0] == spec.reference_category else labels[0]
        out = np.full(len(col), np.nan)
        for i, v in enumerate(col):
            if v is None or (isinstance(v, float) and np.isnan(v)):
                continue
            key = _label(v)
            if key == spec.reference_category:
                out[i] = 0.0
            elif key == other:
                out[i] = 1.0
            else:
                raise UnknownCategory(spec.name, v, row=i)
        return out, other
    col = _numeric(data, spec)
    bad = ~np.isnan(col) & (col != 0) & (col != 1)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise UnknownCategory(spec.name, col[i], row=i)
    return col.copy(), None


def _label(v) -> str:
    if isinstance(v, float) and v.is_integer():
        return str(int(v))
    return str(v)


def _code_nominal(data: Dataset, spec: VariableSpec) -> dict:
    col = data[spec.name]
    cats = spec.categories
    labels = []
    for i, v in enumerate(col):
        if v is None or (isinstance(v, float) and np.isnan(v)):
            labels.append(None)
            continue
        key = _label(v)
        if key not in cats:
            raise UnknownCategory(spec.name, v, row=i)
        labels.append(key)
    out = {}
    for c in cats:
        if c == spec.reference_category:
            continue
        out[c] = np.array([np.nan if lab is None else float(lab == c) for lab in labels])
    return out


def percentize_dataset(data: Dataset, specs: Sequence[VariableSpec]) -> PercentizedDataset:
    """Put every declared variable on a percentage (or dummy) scale.

    Numerical columns are percentized with their anchors, binary columns are
    coded 0/1, and nominal columns are expanded into one dummy per
    non-reference category named ``"<var>=<category>"``. Columns without a
    spec are dropped. Missing cells stay missing.
    """
    columns = {}
    log = []
    n = data.n_rows
    for spec in specs:
        if spec.name not in data:
            raise UnknownColumn(spec.name)
        if spec.kind is Kind.NUMERICAL:
            if spec.anchor is None:
                raise MissingAnchor(spec.name)
            columns[spec.name] = np.asarray(percentize_value(_numeric(data, spec), spec.anchor))
            log.append(
                TransformRecord(spec.name, spec.name, _method_for(spec.anchor), spec.anchor, rows=(0, n))
            )
        elif spec.kind is Kind.BINARY:
            coded, category = _code_binary(data, spec)
            columns[spec.name] = coded
            log.append(TransformRecord(spec.name, spec.name, DUMMY, category=category, rows=(0, n)))
        else:
            for cat, coded in _code_nominal(data, spec).items():
                name = f"{spec.name}={cat}"
                columns[name] = coded
                log.append(TransformRecord(name, spec.name, DUMMY, category=cat, rows=(0, n)))
    return PercentizedDataset(columns, tuple(log), data.source_id)
