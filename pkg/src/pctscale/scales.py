"""Conceptual scales, anchors and variable declarations.

A :class:`ScaleAnchor` is the analyst's frame of reference for a variable:
the conceptual minimum and maximum on the raw scale and the target range the
variable is mapped onto.  Anchors are declarations, not data summaries, so
nothing in this module ever derives one silently from observed values.
:func:`suggest_anchors` only proposes round-number candidates for a human to
confirm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, ROUND_CEILING, ROUND_FLOOR
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateAnchor, NonFiniteInput

TARGET_PRESETS = {
    "0-1": (0.0, 1.0),
    "0-100": (0.0, 100.0),
    "-1-1": (-1.0, 1.0),
}

# Mantissas of round anchor values; candidates are these times 10**k.
ROUND_MANTISSAS = (Decimal(1), Decimal(2), Decimal("2.5"), Decimal(5))


class Provenance(str, Enum):
    DECLARED = "declared"
    SUGGESTED = "suggested"
    OBSERVED = "observed"


class Role(str, Enum):
    DEPENDENT = "dependent"
    INDEPENDENT = "independent"
    MEDIATOR = "mediator"
    CONTROL = "control"


class Kind(str, Enum):
    NUMERICAL = "numerical"
    BINARY = "binary"
    NOMINAL = "nominal"


def _check_finite(*values):
    for v in values:
        if not math.isfinite(v):
            raise NonFiniteInput(f"expected a finite number, got {v!r}")


@dataclass(frozen=True)
class ScaleAnchor:
    """Conceptual range ``[c_n, c_x]`` of a raw scale and its target range."""

    c_n: float
    c_x: float
    target_min: float = 0.0
    target_max: float = 1.0
    provenance: Provenance = Provenance.DECLARED

    def __post_init__(self):
        for name in ("c_n", "c_x", "target_min", "target_max"):
            object.__setattr__(self, name, float(getattr(self, name)))
        object.__setattr__(self, "provenance", Provenance(self.provenance))
        _check_finite(self.c_n, self.c_x, self.target_min, self.target_max)
        if not self.c_x > self.c_n:
            raise DegenerateAnchor(
                f"conceptual maximum {self.c_x:g} must exceed conceptual minimum {self.c_n:g}"
            )
        if not self.target_max > self.target_min:
            raise DegenerateAnchor(
                f"target maximum {self.target_max:g} must exceed target minimum {self.target_min:g}"
            )

    @classmethod
    def with_preset(cls, c_n, c_x, preset="0-1", provenance=Provenance.DECLARED):
        """Build an anchor whose target range is one of ``TARGET_PRESETS``."""
        try:
            lo, hi = TARGET_PRESETS[preset]
        except KeyError:
            raise ValueError(
                f"unknown target preset {preset!r}; expected one of {sorted(TARGET_PRESETS)}"
            ) from None
        return cls(c_n, c_x, lo, hi, provenance)

    @property
    def span(self) -> float:
        return self.c_x - self.c_n

    @property
    def target_span(self) -> float:
        return self.target_max - self.target_min

    @property
    def target(self) -> tuple[float, float]:
        return (self.target_min, self.target_max)

    @property
    def preset(self) -> Optional[str]:
        """Name of the matching target preset, or None for an explicit pair."""
        for name, pair in TARGET_PRESETS.items():
            if pair == self.target:
                return name
        return None


@dataclass(frozen=True)
class VariableSpec:
    """Declaration of one analysis variable.

    Numerical variables need an anchor before they can be percentized;
    binary variables are implicitly anchored at 0 and 1. A binary variable
    read from text declares its two labels in ``categories``, the reference
    label coding to 0.
    """

    name: str
    role: Role = Role.INDEPENDENT
    kind: Kind = Kind.NUMERICAL
    anchor: Optional[ScaleAnchor] = None
    categories: tuple = ()
    reference_category: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "role", Role(self.role))
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "categories", tuple(str(c) for c in self.categories))
        if self.reference_category is not None:
            object.__setattr__(self, "reference_category", str(self.reference_category))
        if len(set(self.categories)) != len(self.categories):
            raise ValueError(f"{self.name}: duplicate category labels")
        if self.kind is Kind.NOMINAL:
            if len(self.categories) < 2:
                raise ValueError(f"nominal variable {self.name!r} needs at least 2 categories")
            if self.reference_category is None:
                object.__setattr__(self, "reference_category", self.categories[0])
            elif self.reference_category not in self.categories:
                raise ValueError(
                    f"reference category {self.reference_category!r} of {self.name!r} "
                    "is not among its categories"
                )
        elif self.kind is Kind.BINARY and self.categories:
            if len(self.categories) != 2:
                raise ValueError(f"binary variable {self.name!r} needs exactly 2 category labels")
            if self.reference_category is None:
                object.__setattr__(self, "reference_category", self.categories[0])
            elif self.reference_category not in self.categories:
                raise ValueError(
                    f"reference category {self.reference_category!r} of {self.name!r} "
                    "is not among its categories"
                )

    @property
    def dummy_names(self) -> tuple[str, ...]:
        """Output column names this variable produces after coding."""
        if self.kind is Kind.NOMINAL:
            return tuple(
                f"{self.name}={c}" for c in self.categories if c != self.reference_category
            )
        return (self.name,)


@dataclass(frozen=True)
class AnchorCandidate:
    pair: tuple[float, float]
    score: float
    rationale: str

    @property
    def anchor(self) -> ScaleAnchor:
        return ScaleAnchor(self.pair[0], self.pair[1], provenance=Provenance.SUGGESTED)


@dataclass(frozen=True)
class AnchorValidation:
    """Outcome of :func:`validate_anchor`.

    ``rows_below`` and ``rows_above`` hold 0-based indices of offending
    values when the raw values were supplied.
    """

    status: str
    warnings: tuple[str, ...] = ()
    rows_below: tuple[int, ...] = ()
    rows_above: tuple[int, ...] = ()
    n_below: int = 0
    n_above: int = 0

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def validate_anchor(
    anchor,
    observed_min: Optional[float] = None,
    observed_max: Optional[float] = None,
    values: Optional[Sequence[float]] = None,
) -> AnchorValidation:
    """Check an anchor against observed data.

    Values outside ``[c_n, c_x]`` produce warnings, never errors: a conceptual
    range is allowed to be exceeded by a real observation. Pass ``values`` to
    get the offending row indices; with only the observed extremes, each
    extreme outside the range counts as one offending value.

    Raises
    ------
    DegenerateAnchor
        If ``c_x <= c_n``. A plain ``(c_n, c_x)`` pair is accepted in place
        of a :class:`ScaleAnchor`.
    """
    if not isinstance(anchor, ScaleAnchor):
        c_n, c_x = anchor
        anchor = ScaleAnchor(c_n, c_x)

    if values is not None:
        arr = np.asarray(values, dtype=float)
        present = ~np.isnan(arr)
        below = np.flatnonzero(present & (arr < anchor.c_n))
        above = np.flatnonzero(present & (arr > anchor.c_x))
        rows_below, rows_above = tuple(int(i) for i in below), tuple(int(i) for i in above)
        n_below, n_above = len(rows_below), len(rows_above)
    else:
        if observed_min is None or observed_max is None:
            raise ValueError("supply observed_min and observed_max, or values")
        _check_finite(observed_min, observed_max)
        if observed_min > observed_max:
            raise ValueError("observed_min exceeds observed_max")
        rows_below = rows_above = ()
        n_below = int(observed_min < anchor.c_n)
        n_above = int(observed_max > anchor.c_x)

    warnings = []
    if n_below:
        noun = "value" if n_below == 1 else "values"
        msg = f"{n_below} {noun} below c_n={anchor.c_n:g}"
        if rows_below:
            msg += " (rows " + ", ".join(map(str, rows_below)) + ")"
        warnings.append(msg)
    if n_above:
        noun = "value" if n_above == 1 else "values"
        msg = f"{n_above} {noun} above c_x={anchor.c_x:g}"
        if rows_above:
            msg += " (rows " + ", ".join(map(str, rows_above)) + ")"
        warnings.append(msg)
    return AnchorValidation(
        status="warning" if warnings else "ok",
        warnings=tuple(warnings),
        rows_below=rows_below,
        rows_above=rows_above,
        n_below=n_below,
        n_above=n_above,
    )


def _is_round(d: Decimal) -> bool:
    if d <= 0:
        return False
    digits = d.normalize().as_tuple().digits
    return digits in ((1,), (2,), (2, 5), (5,))


def _sig_digits(d: Decimal) -> int:
    if d == 0:
        return 1
    digits = list(d.normalize().as_tuple().digits)
    while digits and digits[-1] == 0:
        digits.pop()
    return max(len(digits), 1)


def _fmt(d: Decimal) -> str:
    return format(d.normalize(), "f")


def suggest_anchors(
    observed_min: float,
    observed_max: float,
    declared_bounds: Optional[tuple[float, float]] = None,
) -> list[AnchorCandidate]:
    """Propose round-number conceptual anchors bracketing the observed range.

    For every step ``s`` in {1, 2, 2.5, 5} x 10**k the observed range is
    widened outward to multiples of ``s``. A widened pair is kept when its
    width is itself a round number, so the resulting scale converts easily.
    Candidates are ranked by width, then by the total count of significant
    digits in the endpoints, then by ``|c_n|``.

    A closed-ended scale's declared bounds are returned as the only
    candidate.

    >>> suggest_anchors(18, 83)[0].pair
    (0.0, 100.0)
    """
    _check_finite(observed_min, observed_max)
    if declared_bounds is not None:
        lo, hi = (float(b) for b in declared_bounds)
        _check_finite(lo, hi)
        if not hi > lo:
            raise DegenerateAnchor(f"declared bounds ({lo:g}, {hi:g}) have no width")
        return [AnchorCandidate((lo, hi), 1.0, "declared bounds of a closed-ended scale")]
    if not observed_min < observed_max:
        raise ValueError(
            f"observed range ({observed_min:g}, {observed_max:g}) is empty; declare bounds instead"
        )

    lo_obs = Decimal(repr(float(observed_min)))
    hi_obs = Decimal(repr(float(observed_max)))
    span = hi_obs - lo_obs
    magnitude = max(abs(lo_obs), abs(hi_obs))
    k_lo = math.floor(math.log10(float(span))) - 1
    k_hi = math.ceil(math.log10(float(magnitude))) + 1

    # Largest step first, so each pair is credited to the coarsest grid it lies on.
    found = {}
    for k in range(k_hi, k_lo - 1, -1):
        for m in reversed(ROUND_MANTISSAS):
            step = m.scaleb(k)
            c_n = (lo_obs / step).to_integral_value(ROUND_FLOOR) * step
            c_x = (hi_obs / step).to_integral_value(ROUND_CEILING) * step
            width = c_x - c_n
            if not _is_round(width):
                continue
            key = (c_n.normalize(), c_x.normalize())
            found.setdefault(key, step)

    ranked = sorted(
        found.items(),
        key=lambda item: (
            item[0][1] - item[0][0],
            _sig_digits(item[0][0]) + _sig_digits(item[0][1]),
            abs(item[0][0]),
            item[0][0],
        ),
    )
    out = []
    for i, ((c_n, c_x), step) in enumerate(ranked):
        out.append(
            AnchorCandidate(
                (float(c_n), float(c_x)),
                1.0 / (i + 1),
                f"multiples of {_fmt(step)}; width {_fmt(c_x - c_n)} brackets "
                f"observed [{observed_min:g}, {observed_max:g}]",
            )
        )
    return out
