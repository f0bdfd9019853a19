"""Plain-text reports and delimited tables.

Nothing here depends on wall-clock time or absolute paths, so identical
inputs render to identical bytes.
"""

from __future__ import annotations

import csv
import io
import math
from statistics import NormalDist
from typing import Iterable, Sequence

from .compare import ComparisonReport
from .percentize import format_percent
from .regress import INTERCEPT, BpRegressionResult

TABLE_HEADER = ("variable", "b_p", "se", "ci_low", "ci_high", "rank")
PERCENT_PRECISION = 1
_Z95 = NormalDist().inv_cdf(0.975)


def fmt(value, precision: int) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "NA"
    text = f"{value:.{precision}f}"
    if text.startswith("-") and float(text) == 0:
        text = text[1:]
    return text


def fmt_data(value) -> str:
    if isinstance(value, str):
        return value
    if value is None or math.isnan(value):
        return "NA"
    return format(float(value), ".12g")


def normal_ci(b, se):
    if se is None or math.isnan(se):
        return float("nan"), float("nan")
    return b - _Z95 * se, b + _Z95 * se


def coefficient_rows(result: BpRegressionResult, report: ComparisonReport | None = None) -> list[tuple]:
    """``(variable, b_p, se, ci_low, ci_high, rank)`` with the intercept unranked."""
    ranks = {}
    if report is not None:
        ranks = {e.label: e.rank for e in report.entries}
    rows = []
    for name in result.names:
        b, se = result.coefficients[name], result.standard_errors[name]
        lo, hi = normal_ci(b, se)
        rows.append((name, b, se, lo, hi, ranks.get(name)))
    return rows


def report_rows(report: ComparisonReport) -> list[tuple]:
    rows = []
    for e in report.entries:
        lo, hi = normal_ci(e.b_p, e.standard_error)
        rows.append((e.label, e.b_p, e.standard_error, lo, hi, e.rank))
    return rows


def render_table(rows: Iterable[Sequence], precision: int, delimiter: str = ",", header=TABLE_HEADER) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        out = [row[0]]
        for cell in row[1:]:
            if isinstance(cell, int) and not isinstance(cell, bool):
                out.append(str(cell))
            elif cell is None:
                out.append("")
            else:
                out.append(fmt(cell, precision))
        writer.writerow(out)
    return buf.getvalue()


def render_data_table(columns: dict, delimiter: str = ",") -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    names = list(columns)
    writer.writerow(names)
    n = len(next(iter(columns.values()))) if columns else 0
    for i in range(n):
        writer.writerow([fmt_data(columns[k][i]) for k in names])
    return buf.getvalue()


class TextReport:
    """Line-oriented report builder."""

    def __init__(self, title: str, precision: int):
        self.precision = precision
        self.lines = [
            f"pctscale report: {title}",
            f"coefficients shown to {precision} decimals; percents to {PERCENT_PRECISION} decimal",
        ]

    def blank(self):
        self.lines.append("")

    def add(self, *lines: str):
        self.lines.extend(lines)

    def section(self, heading: str):
        self.blank()
        self.lines.append(heading)
        self.lines.append("-" * len(heading))

    def coefficient_block(self, rows: Sequence[tuple], with_percent: bool = True):
        p = self.precision
        width = max([len("variable")] + [len(r[0]) for r in rows])
        head = f"{'variable':<{width}}  {'b_p':>{p + 4}}  {'percent':>8}  {'se':>{p + 4}}  {'95% CI':<{2 * p + 11}}  rank"
        self.lines.append(head)
        for name, b, se, lo, hi, rank in rows:
            pct = format_percent(b, PERCENT_PRECISION) if with_percent and name != INTERCEPT else ""
            ci = f"[{fmt(lo, p)}, {fmt(hi, p)}]"
            self.lines.append(
                f"{name:<{width}}  {fmt(b, p):>{p + 4}}  {pct:>8}  {fmt(se, p):>{p + 4}}  "
                f"{ci:<{2 * p + 11}}  {'' if rank is None else rank}".rstrip()
            )

    def comparison(self, report: ComparisonReport):
        self.section(f"{report.kind.replace('_', ' ')} (ranked by |b_p|)")
        self.coefficient_block(report_rows(report))
        ties = [e.label for e in report.entries if e.tied]
        if ties:
            self.add(f"tied: {', '.join(ties)}")
        if report.notes:
            self.blank()
            self.add(*(f"note: {n}" for n in report.notes))

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"
