"""Command-line front end.

    pctscale --config analysis.ini --input survey.csv --out report.txt
    pctscale --config pool.ini --input y1992.csv --input y1993.csv --format table --out pooled.csv

Every module error maps to its own nonzero exit status (see
:mod:`pctscale.errors`); a report file exists only after a fully successful
run.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .compare import (
    TOTAL_KEY,
    mediation_report,
    mediation_paths,
    path_standard_error,
    percent_difference_report,
    pool_datasets,
    relative_impact,
    relative_importance,
)
from .config import COMMANDS, FORMATS, AnalysisConfig, load_config
from .dataset import Dataset, load_csv
from .errors import ConfigError, PctScaleError
from .percentize import PercentizedDataset, format_percent, percentize_dataset
from .regress import (
    INTERCEPT,
    BpRegressionResult,
    build_design,
    fit_ols,
    percent_difference,
    pomp_coefficients,
    standardized_coefficients,
)
from .report import (
    PERCENT_PRECISION,
    TextReport,
    coefficient_rows,
    fmt,
    normal_ci,
    render_data_table,
    render_table,
    report_rows,
)
from .scales import Kind, Role, suggest_anchors, validate_anchor

EXIT_IO = 5
MAX_SUGGESTIONS = 5


def _load(config: AnalysisConfig, path: Path) -> Dataset:
    return load_csv(path, delimiter=config.delimiter, categorical=config.categorical_columns)


def _columns(config: AnalysisConfig, *roles: Role) -> list[str]:
    return [name for s in config.specs if s.role in roles for name in s.dummy_names]


def _describe_transforms(rep: TextReport, data: PercentizedDataset):
    rep.section("transforms")
    rep.add(*(rec.describe() for rec in data.transform_log))


def _describe_fit(rep: TextReport, result: BpRegressionResult):
    rep.add(
        f"rows used: {result.n_used} (dropped by listwise deletion: {result.rows_dropped})",
        f"R^2: {fmt(result.r_squared, rep.precision)}",
        f"residual variance: {fmt(result.residual_variance, rep.precision)}",
    )


def _single_input(config: AnalysisConfig) -> tuple[Dataset, PercentizedDataset]:
    data = _load(config, config.inputs[0])
    return data, percentize_dataset(data, config.specs)


def _header(rep: TextReport, config: AnalysisConfig, data: Dataset):
    names = ", ".join(Path(p).name for p in config.inputs)
    rep.add(f"input: {names} ({data.n_rows} rows)" if data is not None else f"inputs: {names}")


def cmd_percentize(config):
    data, pdata = _single_input(config)
    rep = TextReport("percentize", config.precision)
    _header(rep, config, data)
    _describe_transforms(rep, pdata)
    _summarize_columns(rep, pdata)
    return rep.text(), render_data_table(pdata.columns, config.delimiter)


def _summarize_columns(rep: TextReport, pdata: PercentizedDataset):
    rep.section("percentized columns")
    p = rep.precision
    for name in pdata.names:
        if any(r.method == "part-id" for r in pdata.records(name)):
            continue
        col = np.asarray(pdata[name], dtype=float)
        present = col[~np.isnan(col)]
        if present.size:
            rep.add(
                f"{name}: n={present.size} missing={col.size - present.size} "
                f"min={fmt(present.min(), p)} ({format_percent(present.min())}) "
                f"max={fmt(present.max(), p)} ({format_percent(present.max())})"
            )
        else:
            rep.add(f"{name}: all missing")


def _fit(config, pdata, dv, predictors) -> BpRegressionResult:
    return fit_ols(build_design(pdata, dv, predictors))


def cmd_regress(config):
    data, pdata = _single_input(config)
    dv = config.with_role(Role.DEPENDENT)[0].name
    preds = _columns(config, Role.INDEPENDENT, Role.MEDIATOR, Role.CONTROL)
    design = build_design(pdata, dv, preds)
    result = fit_ols(design)
    ranking = relative_importance(result) if len(preds) >= 2 else None
    rows = coefficient_rows(result, ranking)
    if ranking is None:
        rows = [r[:5] + ((1,) if r[0] != INTERCEPT else (None,)) for r in rows]

    rep = TextReport("regress", config.precision)
    _header(rep, config, data)
    _describe_transforms(rep, pdata)
    rep.section(f"percentage coefficients, DV = {dv}")
    _describe_fit(rep, result)
    rep.blank()
    rep.coefficient_block(rows)
    p = config.precision
    pomp = pomp_coefficients(result)
    beta = standardized_coefficients(design)
    rep.section("POMP (0-100) coefficients and standardized beta for contrast")
    for name in result.names:
        b = fmt(beta[name], p) if name in beta else ""
        rep.add(f"{name}: POMP {fmt(pomp[name], p)}" + (f"  beta {b}" if b else ""))
    return rep.text(), render_table(rows, p, config.delimiter)


def cmd_compare_importance(config):
    data, pdata = _single_input(config)
    dv = config.with_role(Role.DEPENDENT)[0].name
    preds = _columns(config, Role.INDEPENDENT, Role.MEDIATOR, Role.CONTROL)
    result = _fit(config, pdata, dv, preds)
    report = relative_importance(result)

    rep = TextReport("compare-importance", config.precision)
    _header(rep, config, data)
    _describe_transforms(rep, pdata)
    rep.section(f"fit, DV = {dv}")
    _describe_fit(rep, result)
    rep.comparison(report)
    return rep.text(), render_table(report_rows(report), config.precision, config.delimiter)


def cmd_compare_impact(config):
    data, pdata = _single_input(config)
    iv = config.focal_iv()
    preds = _columns(config, Role.INDEPENDENT, Role.CONTROL)
    iv_cols = config.spec(iv).dummy_names
    if len(iv_cols) != 1:
        raise ConfigError(f"compare-impact needs a single-column IV; {iv!r} codes to {len(iv_cols)} dummies")
    results = [_fit(config, pdata, s.name, preds) for s in config.with_role(Role.DEPENDENT)]
    report = relative_impact(results, iv_cols[0])

    rep = TextReport("compare-impact", config.precision)
    _header(rep, config, data)
    _describe_transforms(rep, pdata)
    rep.section(f"fits of {iv} on each DV")
    for res in results:
        rep.add(f"{res.dv_name}: n={res.n_used} dropped={res.rows_dropped} R^2={fmt(res.r_squared, config.precision)}")
    rep.comparison(report)
    return rep.text(), render_table(report_rows(report), config.precision, config.delimiter)


def cmd_percent_diff(config):
    data, pdata = _single_input(config)
    dv_spec = config.with_role(Role.DEPENDENT)[0]
    if dv_spec.kind is not Kind.NUMERICAL:
        raise ConfigError("percent-diff needs a numerical DV")
    group = config.focal_iv()
    g = np.asarray(pdata[group], dtype=float)
    raw = np.asarray(data[dv_spec.name], dtype=float)
    diff = percent_difference(raw[g == 1], raw[g == 0], dv_spec.anchor)
    gspec = config.spec(group)
    if gspec.categories:
        treated = next(c for c in gspec.categories if c != gspec.reference_category)
        label = f"{group}={treated} minus {group}={gspec.reference_category}"
    else:
        label = f"{group}=1 minus {group}=0"
    report = percent_difference_report(diff, label)

    rep = TextReport("percent-diff", config.precision)
    _header(rep, config, data)
    _describe_transforms(rep, pdata)
    rep.section(f"percent difference in {dv_spec.name}")
    rep.add(
        f"difference: {fmt(diff.estimate, config.precision)} "
        f"({fmt(diff.estimate * 100, PERCENT_PRECISION)} percentage points)",
        f"pooled-variance se: {fmt(diff.standard_error, config.precision)}",
        f"rows without a group value: {int(np.isnan(g).sum())}",
    )
    rep.comparison(report)
    return rep.text(), render_table(report_rows(report), config.precision, config.delimiter)


def cmd_pool(config):
    parts = [(_load(config, p), config.specs) for p in config.inputs]
    labels = config.part_labels or tuple(Path(p).stem for p in config.inputs)
    if len(set(labels)) != len(labels):
        labels = tuple(str(i + 1) for i in range(len(parts)))
    if len(labels) != len(parts):
        raise ConfigError(f"{len(labels)} part labels for {len(parts)} inputs")
    pooled = pool_datasets(parts, config.part_anchors, labels, part_dummies=config.part_effects)

    rep = TextReport("pool", config.precision)
    rep.add("inputs: " + ", ".join(f"{Path(p).name} [{lab}] ({d.n_rows} rows)" for p, lab, (d, _) in zip(config.inputs, labels, parts)))
    rep.add(f"pooled rows: {pooled.n_rows}")
    _describe_transforms(rep, pooled)
    _summarize_columns(rep, pooled)

    dvs = config.with_role(Role.DEPENDENT)
    preds = _columns(config, Role.INDEPENDENT, Role.MEDIATOR, Role.CONTROL)
    if config.part_effects:
        preds += [n for n in pooled.names if n.startswith("part=")]
    if len(dvs) == 1 and len(preds) >= 2:
        result = _fit(config, pooled, dvs[0].name, preds)
        rep.section(f"pooled fit, DV = {dvs[0].name}")
        _describe_fit(rep, result)
        rep.comparison(relative_importance(result, kind="pooled"))
    return rep.text(), render_data_table(pooled.columns, config.delimiter)


def cmd_mediate(config):
    data, pdata = _single_input(config)
    dv = config.with_role(Role.DEPENDENT)[0].name
    iv_cols = config.spec(config.focal_iv()).dummy_names
    if len(iv_cols) != 1:
        raise ConfigError("mediate needs a single-column IV")
    iv = iv_cols[0]
    mediators = [s.name for s in config.with_role(Role.MEDIATOR)]
    controls = _columns(config, Role.CONTROL)
    controls += [c for c in _columns(config, Role.INDEPENDENT) if c != iv]
    decomp = mediation_paths(pdata, dv, iv, mediators, controls)
    report = mediation_report(decomp)

    rep = TextReport("mediate", config.precision)
    _header(rep, config, data)
    _describe_transforms(rep, pdata)
    rep.section("serial mediation")
    p = config.precision
    rep.add(
        f"chain: {' -> '.join([iv, *mediators, dv])}",
        f"controls: {', '.join(controls) if controls else 'none'}",
        f"total effect: {fmt(decomp.total_effect, p)} ({format_percent(decomp.total_effect)})",
        f"direct effect: {fmt(decomp.direct_effect, p)} ({format_percent(decomp.direct_effect)})",
        f"total indirect: {fmt(decomp.total_indirect, p)} ({format_percent(decomp.total_indirect)})",
        "indirect effects are products of path b_p values; no interval estimates are given for them",
    )
    rep.comparison(report)
    rows = report_rows(report)
    for path, b in decomp.paths.items():
        se = path_standard_error(decomp, path)
        rows.append((f"path: {path}", b, se, *normal_ci(b, se), None))
    total_se = decomp.equations[TOTAL_KEY].standard_errors[iv]
    rows.append(("total", decomp.total_effect, total_se, *normal_ci(decomp.total_effect, total_se), None))
    return rep.text(), render_table(rows, p, config.delimiter)


def cmd_anchors_suggest(config):
    data = _load(config, config.inputs[0])
    names = list(config.suggest_for) or [s.name for s in config.specs if s.kind is Kind.NUMERICAL]
    rep = TextReport("anchors-suggest", config.precision)
    _header(rep, config, data)
    rows = []
    for name in names:
        spec = config.spec(name)
        col = data[name]
        if col.dtype.kind != "f":
            raise ConfigError(f"{name!r} is not numeric; anchors apply to numerical variables")
        present = col[~np.isnan(col)]
        if present.size == 0:
            raise ConfigError(f"{name!r} has no observed values")
        lo, hi = float(present.min()), float(present.max())
        cands = suggest_anchors(lo, hi, config.declared_bounds.get(name))
        rep.section(f"{name}: observed ({lo:g}, {hi:g})")
        for i, c in enumerate(cands[:MAX_SUGGESTIONS], start=1):
            rep.add(f"{i}. ({c.pair[0]:g}, {c.pair[1]:g})  {c.rationale}")
            rows.append((name, c.pair[0], c.pair[1], c.score, i))
        if spec.anchor is not None:
            check = validate_anchor(spec.anchor, values=col)
            rep.add(f"declared anchor ({spec.anchor.c_n:g}, {spec.anchor.c_x:g}): {check.status}")
            rep.add(*(f"  warning: {w}" for w in check.warnings))
    rep.blank()
    rep.add("suggestions only; the conceptual anchor is the analyst's decision")
    header = ("variable", "c_n", "c_x", "score", "rank")
    return rep.text(), render_table(rows, config.precision, config.delimiter, header=header)


HANDLERS = {
    "percentize": cmd_percentize,
    "regress": cmd_regress,
    "compare-importance": cmd_compare_importance,
    "compare-impact": cmd_compare_impact,
    "percent-diff": cmd_percent_diff,
    "pool": cmd_pool,
    "mediate": cmd_mediate,
    "anchors-suggest": cmd_anchors_suggest,
}
assert set(HANDLERS) == set(COMMANDS)


def write_atomic(path: Path, text: str):
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(config: AnalysisConfig, stdout=None) -> int:
    """Execute a validated config; returns the process exit status."""
    text, table = HANDLERS[config.command](config)
    payload = table if config.format == "table" else text
    if config.out is None:
        (stdout or sys.stdout).write(payload)
    else:
        write_atomic(config.out, payload)
    return 0


def _delimiter(text: str) -> str:
    return {"\\t": "\t", "tab": "\t"}.get(text, text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pctscale",
        description="Percentize variables with conceptual anchors and compare percentage coefficients (b_p).",
    )
    parser.add_argument("--config", required=True, help="analysis config (INI)")
    parser.add_argument("--input", action="append", default=[], help="delimited data file; repeat to pool")
    parser.add_argument("--out", help="output path (default: stdout)")
    parser.add_argument("--format", choices=FORMATS, default="text", help="text report or delimited table")
    parser.add_argument("--delimiter", default=",", help="field delimiter for input and table output")
    parser.add_argument("--precision", type=int, default=4, help="decimals for coefficients (default 4)")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(
            args.config,
            inputs=args.input,
            out=args.out,
            format=args.format,
            delimiter=_delimiter(args.delimiter),
            precision=args.precision,
        )
        return run(config)
    except PctScaleError as exc:
        print(f"pctscale: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"pctscale: error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
