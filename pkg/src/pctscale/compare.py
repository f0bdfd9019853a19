"""Comparisons that equal percentage-scale units make meaningful.

Reports only rank and relabel coefficients taken from fitted results; they
never re-estimate anything, so each reported ``b_p`` is the fitted value
itself.
"""

from __future__ import annotations

import dataclasses
import itertools
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .dataset import Dataset
from .errors import MissingIv, SchemaMismatch, TooFewPredictors
from .percentize import DUMMY, PercentizedDataset, TransformRecord, percentize_dataset
from .regress import BpRegressionResult, PercentDifference, build_design, fit_ols
from .scales import ScaleAnchor, VariableSpec

TOTAL_KEY = "(total effect)"
KINDS = ("relative_importance", "relative_impact", "percent_difference", "pooled", "mediation")


@dataclass(frozen=True)
class ComparisonEntry:
    label: str
    b_p: float
    standard_error: float
    rank: int
    tied: bool = False


@dataclass(frozen=True)
class ComparisonReport:
    kind: str
    entries: tuple
    notes: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown report kind {self.kind!r}")

    def labels(self) -> list[str]:
        return [e.label for e in self.entries]

    def entry(self, label) -> ComparisonEntry:
        for e in self.entries:
            if e.label == label:
                return e
        raise KeyError(label)


def rank_entries(items: Sequence[tuple]) -> tuple:
    """Order ``(label, b_p, se)`` triples by descending ``|b_p|``.

    Equal magnitudes keep their input order, share the better rank
    (1, 1, 3 style) and are flagged as tied.
    """
    order = sorted(range(len(items)), key=lambda i: (-abs(items[i][1]), i))
    mags = [abs(items[i][1]) for i in order]
    entries = []
    rank = 0
    for pos, i in enumerate(order):
        if pos == 0 or mags[pos] != mags[pos - 1]:
            rank = pos + 1
        tied = (pos > 0 and mags[pos] == mags[pos - 1]) or (
            pos + 1 < len(order) and mags[pos] == mags[pos + 1]
        )
        label, b, se = items[i]
        entries.append(ComparisonEntry(label, b, se, rank, tied))
    return tuple(entries)


def _anchor_note(name: str, anchor: Optional[ScaleAnchor], dummy: bool = False) -> str:
    if anchor is None:
        return f"{name}: 0/1 dummy" if dummy else f"{name}: anchors differ by part"
    return f"{name}: anchored ({anchor.c_n:g}, {anchor.c_x:g}) -> [{anchor.target_min:g}, {anchor.target_max:g}]"


def relative_importance(result: BpRegressionResult, kind: str = "relative_importance") -> ComparisonReport:
    """Rank the predictors of one fit by ``|b_p|``.

    Numerical, binary and nominal-dummy predictors compete on equal footing.
    A nominal variable contributes one entry per dummy; no composite effect
    is formed.
    """
    preds = result.predictors
    if len(preds) < 2:
        raise TooFewPredictors(f"relative importance needs at least 2 predictors, got {len(preds)}")
    items = [(p, result.coefficients[p], result.standard_errors[p]) for p in preds]
    notes = [_anchor_note(result.dv_name, result.dv_anchor) + " (DV)"]
    notes += [_anchor_note(p, result.iv_anchors.get(p), p in result.dummies) for p in preds]
    return ComparisonReport(kind, rank_entries(items), tuple(notes))


def relative_impact(
    results: Sequence[BpRegressionResult],
    iv_name: str,
    labels: Optional[Sequence[str]] = None,
) -> ComparisonReport:
    """Rank the effect of one IV across several DVs."""
    if labels is None:
        labels = [r.dv_name for r in results]
    labels = list(labels)
    seen = {}
    for i, lab in enumerate(labels):
        seen[lab] = seen.get(lab, 0) + 1
        if seen[lab] > 1:
            labels[i] = f"{lab} ({seen[lab]})"
    items = []
    notes = []
    for lab, res in zip(labels, results):
        if iv_name not in res.predictors:
            raise MissingIv(iv_name, lab)
        items.append((lab, res.coefficients[iv_name], res.standard_errors[iv_name]))
        notes.append(_anchor_note(res.dv_name, res.dv_anchor) + " (DV)")
    if results:
        first = results[0]
        notes.append(_anchor_note(iv_name, first.iv_anchors.get(iv_name), iv_name in first.dummies) + " (IV)")
    return ComparisonReport("relative_impact", rank_entries(items), tuple(notes))


def percent_difference_report(diff: PercentDifference, label: str = "treatment - control") -> ComparisonReport:
    notes = (
        f"n treatment = {diff.n_treatment}, n control = {diff.n_control}",
        f"mean treatment = {diff.mean_treatment:.4f}, mean control = {diff.mean_control:.4f}",
    )
    return ComparisonReport(
        "percent_difference", rank_entries([(label, diff.estimate, diff.standard_error)]), notes
    )


def pool_datasets(
    parts: Sequence[tuple[Dataset, Sequence[VariableSpec]]],
    unify: Optional[Mapping[str, Sequence[ScaleAnchor]]] = None,
    part_labels: Optional[Sequence[str]] = None,
    part_column: str = "part",
    part_dummies: bool = False,
) -> PercentizedDataset:
    """Percentize each part with its own anchors and stack the rows.

    ``unify`` maps a variable to one anchor per part, overriding the anchors
    in that part's specs; this is how a 7-point item in one wave and a
    9-point item in another become one 0-1 variable. A ``part_column`` holds
    the 1-based part index. With ``part_dummies`` the parts after the first
    also get 0/1 indicator columns ``"<part_column>=<label>"`` for use as
    fixed effects.
    """
    if not parts:
        raise ValueError("nothing to pool")
    unify = dict(unify or {})
    if part_labels is None:
        part_labels = [str(i + 1) for i in range(len(parts))]
    part_labels = [str(p) for p in part_labels]
    if len(part_labels) != len(parts) or len(set(part_labels)) != len(part_labels):
        raise ValueError("need one distinct label per part")
    for var, anchors in unify.items():
        if len(anchors) != len(parts):
            raise SchemaMismatch(f"{var!r}: {len(anchors)} anchors for {len(parts)} parts")

    percentized = []
    for i, (data, specs) in enumerate(parts):
        names = {s.name for s in specs}
        for var in unify:
            if var not in names:
                raise SchemaMismatch(f"part {part_labels[i]} does not declare {var!r}")
        specs = [
            dataclasses.replace(s, anchor=unify[s.name][i]) if s.name in unify else s for s in specs
        ]
        percentized.append(percentize_dataset(data, specs))

    schema = percentized[0].names
    for lab, p in zip(part_labels, percentized):
        if p.names != schema:
            raise SchemaMismatch(f"part {lab} yields columns {list(p.names)}, expected {list(schema)}")
    if part_column in schema:
        raise SchemaMismatch(f"part column name {part_column!r} clashes with a variable")

    columns = {name: np.concatenate([np.asarray(p[name]) for p in percentized]) for name in schema}
    log = []
    ids = []
    offset = 0
    for lab, p in zip(part_labels, percentized):
        n = p.n_rows
        for rec in p.transform_log:
            lo, hi = rec.rows
            log.append(dataclasses.replace(rec, rows=(lo + offset, hi + offset), part=lab))
        ids.append((lab, offset, offset + n))
        offset += n

    columns[part_column] = np.concatenate(
        [np.full(hi - lo, float(i + 1)) for i, (_, lo, hi) in enumerate(ids)]
    )
    log.append(TransformRecord(part_column, part_column, "part-id", rows=(0, offset)))
    if part_dummies:
        for lab, lo, hi in ids[1:]:
            name = f"{part_column}={lab}"
            col = np.zeros(offset)
            col[lo:hi] = 1.0
            columns[name] = col
            log.append(TransformRecord(name, part_column, DUMMY, category=lab, rows=(0, offset)))
    source = " + ".join(p.source_id or lab for lab, p in zip(part_labels, percentized))
    return PercentizedDataset(columns, tuple(log), source)


def _arrow(*nodes) -> str:
    return " -> ".join(nodes)


@dataclass(frozen=True)
class MediationDecomposition:
    """Path coefficients of a serial mediation model and their route products.

    ``paths`` is keyed ``"a -> b"``; ``indirect_effects`` is keyed by the
    full route ``"iv -> m1 -> ... -> dv"``.
    """

    iv: str
    dv: str
    mediators: tuple
    paths: dict
    indirect_effects: dict
    total_effect: float
    direct_effect: float
    n_used: Optional[int] = None
    equations: dict = field(default_factory=dict, repr=False)

    @property
    def total_indirect(self) -> float:
        return float(sum(self.indirect_effects.values()))

    @property
    def decomposition_gap(self) -> float:
        """``total - (direct + sum of indirect)``; zero up to rounding on a common sample."""
        return self.total_effect - (self.direct_effect + self.total_indirect)

    @classmethod
    def from_paths(cls, iv: str, dv: str, mediators: Sequence[str], paths: Mapping[str, float]):
        """Decompose given path coefficients; total is direct plus indirect."""
        mediators = tuple(mediators)
        indirect = route_products(iv, dv, mediators, paths)
        direct = paths[_arrow(iv, dv)]
        total = direct + sum(indirect.values())
        return cls(iv, dv, mediators, dict(paths), indirect, total, direct)


def route_products(iv: str, dv: str, mediators: Sequence[str], paths: Mapping[str, float]) -> dict:
    """Product of path coefficients along every serial route through the mediators.

    Routes visit mediators in declared order; any nonempty ordered subset is
    a route.
    """
    out = {}
    for k in range(1, len(mediators) + 1):
        for subset in itertools.combinations(mediators, k):
            nodes = (iv, *subset, dv)
            prod = 1.0
            for a, b in zip(nodes, nodes[1:]):
                prod *= paths[_arrow(a, b)]
            out[_arrow(*nodes)] = prod
    return out


def mediation_paths(
    data: PercentizedDataset,
    dv: str,
    iv: str,
    mediators: Sequence[str],
    controls: Sequence[str] = (),
) -> MediationDecomposition:
    """Fit a serial mediation system on percentized columns.

    Mediator ``j`` is regressed on the IV, mediators before it and the
    controls; the DV on the IV, all mediators and the controls; the total
    effect comes from the DV on the IV and controls. Every equation uses the
    same complete-case sample, which makes ``total = direct + sum(indirect)``
    hold exactly up to rounding.
    """
    mediators = tuple(mediators)
    controls = tuple(controls)
    used = (dv, iv, *mediators, *controls)
    if len(set(used)) != len(used):
        raise ValueError("dv, iv, mediators and controls must be distinct")
    mask = np.ones(data.n_rows, dtype=bool)
    for name in used:
        mask &= ~np.isnan(np.asarray(data[name], dtype=float))

    paths = {}
    equations = {}
    for j, m in enumerate(mediators):
        preds = (iv, *mediators[:j], *controls)
        fit = fit_ols(build_design(data, m, preds, rows=mask))
        equations[m] = fit
        for p in (iv, *mediators[:j]):
            paths[_arrow(p, m)] = fit.coefficients[p]
    outcome = fit_ols(build_design(data, dv, (iv, *mediators, *controls), rows=mask))
    equations[dv] = outcome
    paths[_arrow(iv, dv)] = outcome.coefficients[iv]
    for m in mediators:
        paths[_arrow(m, dv)] = outcome.coefficients[m]
    total = fit_ols(build_design(data, dv, (iv, *controls), rows=mask))
    equations[TOTAL_KEY] = total

    return MediationDecomposition(
        iv=iv,
        dv=dv,
        mediators=mediators,
        paths=paths,
        indirect_effects=route_products(iv, dv, mediators, paths),
        total_effect=total.coefficients[iv],
        direct_effect=paths[_arrow(iv, dv)],
        n_used=int(mask.sum()),
        equations=equations,
    )


def path_standard_error(decomp: MediationDecomposition, path: str) -> float:
    """Classical OLS error of a single path from the equation that estimated it."""
    src, dst = path.split(" -> ")
    fit = decomp.equations.get(dst)
    if fit is None or src not in fit.standard_errors:
        return float("nan")
    return fit.standard_errors[src]


def mediation_report(decomp: MediationDecomposition) -> ComparisonReport:
    """Rank the direct path and every indirect route.

    Route products carry no standard error: interval estimation for products
    of coefficients is not provided.
    """
    direct = _arrow(decomp.iv, decomp.dv)
    items = [(f"direct: {direct}", decomp.direct_effect, path_standard_error(decomp, direct))]
    items += [(f"indirect: {route}", b, float("nan")) for route, b in decomp.indirect_effects.items()]
    notes = [f"total effect = {decomp.total_effect:.4f}", f"total indirect = {decomp.total_indirect:.4f}"]
    if decomp.n_used is not None:
        notes.append(f"common estimation sample n = {decomp.n_used}")
    notes += [f"path {p} = {b:.4f}" for p, b in decomp.paths.items()]
    return ComparisonReport("mediation", rank_entries(items), tuple(notes))
